#include <doctest.h>

#include <set>

#include "test_util.hpp"
#include "trc/error.hpp"
#include "trc/rules.hpp"

using trc::Error;

namespace {

const char* kStudentSpec = R"({
  "classes": ["Excellent", "Bad", "Good"],
  "default_class": "Good",
  "compactness_attributes": ["mark"],
  "aggregates": [{"name": "mark_mean", "source": "mark", "kind": "mean"}],
  "params": [
    {"name": "p_hi", "lower": 65, "upper": 100, "step": 1},
    {"name": "p_lo", "lower": 50, "upper": 58, "step": 1}
  ],
  "rules": [
    {"class": "Excellent", "combine": "all",
     "conditions": [{"attr": "mark_mean", "op": ">=", "param": "p_hi"}]},
    {"class": "Bad", "combine": "all",
     "conditions": [{"attr": "mark_mean", "op": "<=", "param": "p_lo"}]}
  ]
})";

trc::AggregatedView single_column_view(std::vector<std::string> ids, std::vector<double> values,
                                       std::string column = "mark_mean") {
  trc::AggregatedView view;
  view.object_ids = std::move(ids);
  view.column_names = {std::move(column)};
  view.columns = {std::move(values)};
  return view;
}

#define CHECK_ERROR_KIND(expr, expected)  \
  do {                                    \
    try {                                 \
      (void)(expr);                       \
      FAIL("expected " expected);         \
    } catch (const Error& e) {            \
      CHECK(e.kind() == (expected));      \
    }                                     \
  } while (0)

}  // namespace

TEST_CASE("parse_rule_spec reads the student template") {
  const auto tmpl = trc::parse_rule_spec(kStudentSpec);
  CHECK(tmpl.classes.size() == 3);
  CHECK(tmpl.rules.size() == 2);
  CHECK(tmpl.params.size() == 2);
  CHECK(tmpl.default_class == "Good");
  CHECK(tmpl.rules[0].class_name == "Excellent");  // order preserved
  CHECK(tmpl.rules[1].class_name == "Bad");
  CHECK(tmpl.params[0].grid_size() == 36);
  CHECK(tmpl.params[1].grid_size() == 9);
}

TEST_CASE("parse_rule_spec validation errors") {
  CHECK_ERROR_KIND(trc::parse_rule_spec("{not json"), "SyntaxError");
  CHECK_ERROR_KIND(trc::parse_rule_spec(R"({
    "classes": ["A", "B"], "default_class": "B", "compactness_attributes": ["x"],
    "aggregates": [], "params": [],
    "rules": [{"class": "A", "combine": "all",
               "conditions": [{"attr": "m", "op": "<", "param": "ghost"}]}]
  })"),
                   "UnknownParam");
  CHECK_ERROR_KIND(trc::parse_rule_spec(R"({
    "classes": ["A", "B"], "default_class": "B", "compactness_attributes": ["x"],
    "aggregates": [], "params": [],
    "rules": [{"class": "C", "combine": "all",
               "conditions": [{"attr": "m", "op": "<", "param": "p"}]}]
  })"),
                   "UnknownClass");
  CHECK_ERROR_KIND(trc::parse_rule_spec(R"({
    "classes": ["A", "B"], "default_class": "B", "compactness_attributes": ["x"],
    "aggregates": [], "params": [],
    "rules": [{"class": "A", "combine": "all", "conditions": []}]
  })"),
                   "EmptyRule");
  CHECK_ERROR_KIND(trc::parse_rule_spec(R"({
    "classes": ["A"], "default_class": "A", "compactness_attributes": ["x"],
    "aggregates": [],
    "params": [{"name": "p", "lower": 0, "upper": 1, "step": 1},
               {"name": "p", "lower": 0, "upper": 2, "step": 1}],
    "rules": []
  })"),
                   "DuplicateParam");
  CHECK_ERROR_KIND(trc::parse_rule_spec(R"({
    "classes": ["A"], "default_class": "A", "compactness_attributes": [],
    "aggregates": [], "params": [], "rules": []
  })"),
                   "InvalidTemplate");
}

TEST_CASE("grid endpoints are closed and overshoot truncates") {
  trc::ParamRange r{"p", 0.0, 1.0, 0.5};
  CHECK(r.grid_size() == 3);
  CHECK(r.grid_value(2) == 1.0);
  trc::ParamRange truncated{"p", 0.0, 0.9, 0.2};
  CHECK(truncated.grid_size() == 5);  // 0, .2, .4, .6, .8
  CHECK(truncated.grid_value(4) == doctest::Approx(0.8));
  trc::ParamRange degenerate{"p", 3.0, 3.0, 1.0};
  CHECK(degenerate.grid_size() == 1);
}

TEST_CASE("enumerate_candidates walks the grid lexicographically") {
  const auto tmpl = trc::parse_rule_spec(R"({
    "classes": ["A", "B"], "default_class": "B", "compactness_attributes": ["x"],
    "aggregates": [{"name": "m", "source": "x", "kind": "mean"}],
    "params": [{"name": "a", "lower": 0, "upper": 2, "step": 1},
               {"name": "b", "lower": 10, "upper": 11, "step": 1}],
    "rules": [{"class": "A", "combine": "all",
               "conditions": [{"attr": "m", "op": "<", "param": "a"},
                              {"attr": "m", "op": "<", "param": "b"}]}]
  })");
  const auto grid = trc::enumerate_candidates(tmpl);
  REQUIRE(grid.size() == 6);
  CHECK(grid.bindings_at(0) == std::vector<double>{0, 10});
  CHECK(grid.bindings_at(1) == std::vector<double>{0, 11});
  CHECK(grid.bindings_at(2) == std::vector<double>{1, 10});
  CHECK(grid.bindings_at(5) == std::vector<double>{2, 11});

  std::set<std::vector<double>> distinct;
  for (std::uint64_t i = 0; i < grid.size(); ++i) distinct.insert(grid.bindings_at(i));
  CHECK(distinct.size() == grid.size());
}

TEST_CASE("student grids multiply to 324 candidates, all distinct") {
  const auto tmpl = trc::parse_rule_spec(kStudentSpec);
  const auto grid = trc::enumerate_candidates(tmpl);
  REQUIRE(grid.size() == 324);
  std::set<std::vector<double>> distinct;
  for (std::uint64_t i = 0; i < grid.size(); ++i) {
    const auto bindings = grid.bindings_at(i);
    CHECK(bindings[0] >= 65.0);
    CHECK(bindings[0] <= 100.0);
    CHECK(bindings[1] >= 50.0);
    CHECK(bindings[1] <= 58.0);
    distinct.insert(bindings);
  }
  CHECK(distinct.size() == 324);
}

TEST_CASE("a degenerate range yields one candidate") {
  const auto tmpl = trc::parse_rule_spec(R"({
    "classes": ["A"], "default_class": "A", "compactness_attributes": ["x"],
    "aggregates": [{"name": "m", "source": "x", "kind": "mean"}],
    "params": [{"name": "p", "lower": 7, "upper": 7, "step": 2}],
    "rules": [{"class": "A", "combine": "all",
               "conditions": [{"attr": "m", "op": "<", "param": "p"}]}]
  })");
  const auto grid = trc::enumerate_candidates(tmpl);
  CHECK(grid.size() == 1);
  CHECK(grid.bindings_at(0) == std::vector<double>{7});
}

TEST_CASE("enumerate_candidates enforces the grid cap") {
  const auto tmpl = trc::parse_rule_spec(R"({
    "classes": ["A"], "default_class": "A", "compactness_attributes": ["x"],
    "aggregates": [{"name": "m", "source": "x", "kind": "mean"}],
    "params": [{"name": "a", "lower": 0, "upper": 999, "step": 1},
               {"name": "b", "lower": 0, "upper": 999, "step": 1}],
    "rules": [{"class": "A", "combine": "all",
               "conditions": [{"attr": "m", "op": "<", "param": "a"},
                              {"attr": "m", "op": "<", "param": "b"}]}]
  })");
  CHECK_ERROR_KIND(trc::enumerate_candidates(tmpl, 100000), "GridOverflow");
  CHECK(trc::enumerate_candidates(tmpl, 1000000).size() == 1000000);
}

TEST_CASE("classify matches the worked student thresholds") {
  const auto tmpl = trc::parse_rule_spec(kStudentSpec);
  trc::CandidateClassifier candidate{&tmpl, {76.0, 52.0}};
  const auto view = single_column_view({"hi", "lo", "mid"}, {80.0, 52.0, 60.0});
  const auto labels = trc::classify(view, candidate);
  CHECK(labels.label_of("hi") == "Excellent");
  CHECK(labels.label_of("lo") == "Bad");
  CHECK(labels.label_of("mid") == "Good");
  CHECK(labels.classes == tmpl.classes);
}

TEST_CASE("classify is total and pure") {
  const auto tmpl = trc::parse_rule_spec(kStudentSpec);
  trc::CandidateClassifier candidate{&tmpl, {70.0, 55.0}};
  std::vector<std::string> ids;
  std::vector<double> marks;
  for (int i = 0; i < 57; ++i) {
    ids.push_back("s" + std::to_string(i));
    marks.push_back(static_cast<double>((i * 37) % 101));
  }
  const auto view = single_column_view(ids, marks);
  const auto first = trc::classify(view, candidate);
  const auto second = trc::classify(view, candidate);
  CHECK(first.labels.size() == ids.size());
  CHECK(first.labels == second.labels);
}

TEST_CASE("rule order is semantic, object order is not") {
  auto overlapping = [](bool high_first) {
    std::string rule_hi = R"({"class": "High", "combine": "all",
       "conditions": [{"attr": "m", "op": ">=", "param": "p1"}]})";
    std::string rule_mid = R"({"class": "Mid", "combine": "all",
       "conditions": [{"attr": "m", "op": ">=", "param": "p2"}]})";
    return trc::parse_rule_spec(std::string(R"({
      "classes": ["High", "Mid", "Low"], "default_class": "Low",
      "compactness_attributes": ["x"],
      "aggregates": [{"name": "m", "source": "x", "kind": "mean"}],
      "params": [{"name": "p1", "lower": 10, "upper": 10, "step": 1},
                 {"name": "p2", "lower": 5, "upper": 5, "step": 1}],
      "rules": [)") + (high_first ? rule_hi + "," + rule_mid : rule_mid + "," + rule_hi) +
                                "]}");
  };
  const auto high_first = overlapping(true);
  const auto mid_first = overlapping(false);
  const auto view = single_column_view({"a"}, {12.0}, "m");  // both rules hold
  CHECK(trc::classify(view, trc::CandidateClassifier{&high_first, {10.0, 5.0}}).label_of("a") ==
        "High");
  CHECK(trc::classify(view, trc::CandidateClassifier{&mid_first, {10.0, 5.0}}).label_of("a") ==
        "Mid");

  // Permuting objects never changes any label.
  trc::CandidateClassifier c1{&high_first, {10.0, 5.0}};
  const auto v1 = single_column_view({"a", "b"}, {12.0, 7.0}, "m");
  const auto v2 = single_column_view({"b", "a"}, {7.0, 12.0}, "m");
  CHECK(trc::classify(v1, c1).label_of("a") == trc::classify(v2, c1).label_of("a"));
  CHECK(trc::classify(v1, c1).label_of("b") == trc::classify(v2, c1).label_of("b"));
}

TEST_CASE("equality conditions tolerate decimal parsing artifacts") {
  const auto tmpl = trc::parse_rule_spec(R"({
    "classes": ["Hit", "Miss"], "default_class": "Miss",
    "compactness_attributes": ["x"],
    "aggregates": [{"name": "m", "source": "x", "kind": "mean"}],
    "params": [{"name": "p", "lower": 0.3, "upper": 0.3, "step": 1}],
    "rules": [{"class": "Hit", "combine": "all",
               "conditions": [{"attr": "m", "op": "=", "param": "p"}]}]
  })");
  trc::CandidateClassifier candidate{&tmpl, {0.3}};
  const auto view = single_column_view({"a", "b"}, {0.1 + 0.2, 0.31}, "m");
  const auto labels = trc::classify(view, candidate);
  CHECK(labels.label_of("a") == "Hit");  // 0.1 + 0.2 != 0.3 exactly, but within 1e-9
  CHECK(labels.label_of("b") == "Miss");
}

TEST_CASE("ANY rules fire when any condition holds") {
  const auto tmpl = trc::parse_rule_spec(R"({
    "classes": ["Flagged", "Plain"], "default_class": "Plain",
    "compactness_attributes": ["x"],
    "aggregates": [{"name": "lo", "source": "x", "kind": "min"},
                   {"name": "hi", "source": "x", "kind": "max"}],
    "params": [{"name": "floor", "lower": 2, "upper": 2, "step": 1},
               {"name": "ceil", "lower": 8, "upper": 8, "step": 1}],
    "rules": [{"class": "Flagged", "combine": "any",
               "conditions": [{"attr": "lo", "op": "<", "param": "floor"},
                              {"attr": "hi", "op": ">", "param": "ceil"}]}]
  })");
  trc::AggregatedView view;
  view.object_ids = {"low", "high", "mid"};
  view.column_names = {"lo", "hi"};
  view.columns = {{1.0, 5.0, 4.0}, {6.0, 9.0, 7.0}};
  const auto labels = trc::classify(view, trc::CandidateClassifier{&tmpl, {2.0, 8.0}});
  CHECK(labels.label_of("low") == "Flagged");
  CHECK(labels.label_of("high") == "Flagged");
  CHECK(labels.label_of("mid") == "Plain");
}

TEST_CASE("classify rejects views missing referenced attributes") {
  const auto tmpl = trc::parse_rule_spec(kStudentSpec);
  trc::AggregatedView view;
  view.object_ids = {"a"};
  view.column_names = {"unrelated"};
  view.columns = {{1.0}};
  CHECK_ERROR_KIND(trc::classify(view, trc::CandidateClassifier{&tmpl, {70.0, 55.0}}),
                   "UnknownAttribute");
}

TEST_CASE("labels CSV round-trip") {
  trc::Labeling labels;
  labels.object_ids = {"a", "b"};
  labels.labels = {"X", "Y"};
  labels.classes = {"X", "Y"};
  const auto path = trc_test::write_temp("labels_rt.csv", labels.to_csv());
  const auto loaded = trc::load_labels_csv(path);
  CHECK(loaded.object_ids == labels.object_ids);
  CHECK(loaded.labels == labels.labels);
  CHECK(loaded.classes == labels.classes);
}

TEST_CASE("the shipped game template parses to 8 parameters") {
  const char* pgg = R"({
    "classes": ["FreeRider", "Weak", "Normal", "Strong"],
    "default_class": "Strong",
    "compactness_attributes": ["contribution"],
    "aggregates": [
      {"name": "contribution_mean", "source": "contribution", "kind": "mean"},
      {"name": "belief_mean", "source": "belief", "kind": "mean"},
      {"name": "zero_rounds", "source": "contribution", "kind": "count_eq", "value": 0}
    ],
    "params": [
      {"name": "fr_contrib", "lower": 0, "upper": 1, "step": 1},
      {"name": "wc_contrib", "lower": 1, "upper": 4, "step": 1},
      {"name": "nc_contrib", "lower": 2, "upper": 6, "step": 1},
      {"name": "fr_belief", "lower": 2, "upper": 9, "step": 1},
      {"name": "wc_belief", "lower": 4, "upper": 9, "step": 1},
      {"name": "nc_belief", "lower": 2, "upper": 9, "step": 1},
      {"name": "fr_zero", "lower": 6, "upper": 9, "step": 1},
      {"name": "wc_zero", "lower": 5, "upper": 7, "step": 1}
    ],
    "rules": [
      {"class": "FreeRider", "combine": "any",
       "conditions": [{"attr": "contribution_mean", "op": "<=", "param": "fr_contrib"},
                      {"attr": "belief_mean", "op": "<=", "param": "fr_belief"},
                      {"attr": "zero_rounds", "op": ">=", "param": "fr_zero"}]},
      {"class": "Weak", "combine": "any",
       "conditions": [{"attr": "contribution_mean", "op": "<=", "param": "wc_contrib"},
                      {"attr": "belief_mean", "op": "<=", "param": "wc_belief"},
                      {"attr": "zero_rounds", "op": ">=", "param": "wc_zero"}]},
      {"class": "Normal", "combine": "any",
       "conditions": [{"attr": "contribution_mean", "op": "<=", "param": "nc_contrib"},
                      {"attr": "belief_mean", "op": "<=", "param": "nc_belief"}]}
    ]
  })";
  const auto tmpl = trc::parse_rule_spec(pgg);
  CHECK(tmpl.params.size() == 8);
  CHECK(tmpl.classes == std::vector<std::string>{"FreeRider", "Weak", "Normal", "Strong"});
  // Grid sizes from the declared ranges: 2*4*5*8*6*8*4*3.
  CHECK(trc::enumerate_candidates(tmpl).size() == 2ull * 4 * 5 * 8 * 6 * 8 * 4 * 3);
}

TEST_CASE("every shipped rule template parses and enumerates") {
  const std::string docs = TRC_DOCS_DIR;
  const auto student = trc::load_rule_spec(docs + "/student_rules.json");
  CHECK(trc::enumerate_candidates(student).size() == 324);

  const auto game = trc::load_rule_spec(docs + "/pgg_rules.json");
  CHECK(game.params.size() == 8);
  CHECK(game.classes == std::vector<std::string>{"FreeRider", "Weak", "Normal", "Strong"});
  CHECK(game.default_class == "Strong");
  CHECK(trc::enumerate_candidates(game).size() == 2ull * 4 * 5 * 8 * 6 * 8 * 4 * 3);

  const auto archetype = trc::load_rule_spec(docs + "/archetype_rules.json");
  CHECK(archetype.params.size() == 8);
  CHECK(archetype.compactness_attributes == std::vector<std::string>{"contribution"});
  CHECK(trc::enumerate_candidates(archetype).size() > 0);
}
