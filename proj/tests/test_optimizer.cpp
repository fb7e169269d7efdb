#include <doctest.h>

#include "oracle.hpp"
#include "test_util.hpp"
#include "trc/error.hpp"
#include "trc/evaluation.hpp"
#include "trc/optimizer.hpp"

using trc::Measure;

TEST_CASE("a single-candidate grid returns that candidate") {
  const auto tmpl = trc::parse_rule_spec(R"({
    "classes": ["A", "B"], "default_class": "B", "compactness_attributes": ["x"],
    "aggregates": [{"name": "m", "source": "x", "kind": "mean"}],
    "params": [{"name": "p", "lower": 3, "upper": 3, "step": 1}],
    "rules": [{"class": "A", "combine": "all",
               "conditions": [{"attr": "m", "op": "<=", "param": "p"}]}]
  })");
  const auto data = trc_test::make_univariate({"a", "b"}, {{1, 1}, {9, 9}});
  const auto best = trc::brute_force(tmpl, data, Measure::StdDev);
  CHECK(best.evaluated == 1);
  CHECK(best.ties == 1);
  CHECK(best.candidate.values == std::vector<double>{3.0});
  CHECK(best.labeling.label_of("a") == "A");
  CHECK(best.labeling.label_of("b") == "B");
}

TEST_CASE("student fixture: brute force recovers the planted split") {
  const auto fixture = trc_test::make_student_fixture();
  const auto tmpl = trc::parse_rule_spec(trc_test::student_rule_spec());
  const auto best = trc::brute_force(tmpl, fixture.data, Measure::StdDev);

  CHECK(best.evaluated == 324);
  const double p_hi = best.candidate.binding("p_hi");
  const double p_lo = best.candidate.binding("p_lo");
  CHECK(p_hi > fixture.good_max);
  CHECK(p_hi <= fixture.excellent_min);
  CHECK(p_lo >= fixture.bad_max);
  CHECK(p_lo < fixture.good_min);
  CHECK(trc::label_agreement(best.labeling, fixture.truth) == 1.0);

  // Independent exhaustive pass must agree bit-for-bit, including the
  // lexicographic tie choice.
  const auto oracle = trc_test::oracle_search(tmpl, fixture.data, Measure::StdDev);
  CHECK(best.cost.total == oracle.total);
  CHECK(best.candidate.values == oracle.bindings);
  CHECK(best.ties == oracle.ties);
  CHECK(oracle.bindings == std::vector<double>{66.0, 52.0});
}

TEST_CASE("oracle equivalence on randomized instances") {
  for (std::uint64_t seed : {101u, 102u, 103u, 104u, 105u}) {
    CAPTURE(seed);
    const auto instance = trc_test::make_random_instance(seed, 2000);
    const auto best = trc::brute_force(instance.tmpl, instance.data, instance.measure);
    const auto oracle = trc_test::oracle_search(instance.tmpl, instance.data, instance.measure);
    CHECK(best.evaluated == oracle.evaluated);
    CHECK(best.cost.total == oracle.total);
    CHECK(best.candidate.values == oracle.bindings);
    CHECK(best.ties == oracle.ties);
  }
}

TEST_CASE("result is invariant across worker counts") {
  const auto instance = trc_test::make_random_instance(77, 3000);
  trc::BruteForceOptions one, four, nine;
  one.workers = 1;
  four.workers = 4;
  nine.workers = 9;
  const auto r1 = trc::brute_force(instance.tmpl, instance.data, instance.measure, one);
  const auto r4 = trc::brute_force(instance.tmpl, instance.data, instance.measure, four);
  const auto r9 = trc::brute_force(instance.tmpl, instance.data, instance.measure, nine);
  CHECK(r1.cost.total == r4.cost.total);
  CHECK(r1.candidate.values == r4.candidate.values);
  CHECK(r1.ties == r4.ties);
  CHECK(r1.cost.total == r9.cost.total);
  CHECK(r1.candidate.values == r9.candidate.values);
  CHECK(r1.ties == r9.ties);
  CHECK(r1.labeling.labels == r4.labeling.labels);
}

TEST_CASE("brute_force evaluates the whole grid") {
  const auto instance = trc_test::make_random_instance(55, 1500);
  const auto grid = trc::enumerate_candidates(instance.tmpl);
  const auto best = trc::brute_force(instance.tmpl, instance.data, instance.measure);
  CHECK(best.evaluated == grid.size());
}

TEST_CASE("brute_force propagates GridOverflow") {
  const auto tmpl = trc::parse_rule_spec(R"({
    "classes": ["A"], "default_class": "A", "compactness_attributes": ["x"],
    "aggregates": [{"name": "m", "source": "x", "kind": "mean"}],
    "params": [{"name": "p", "lower": 0, "upper": 1000000, "step": 1}],
    "rules": [{"class": "A", "combine": "all",
               "conditions": [{"attr": "m", "op": "<", "param": "p"}]}]
  })");
  const auto data = trc_test::make_univariate({"a"}, {{1}});
  trc::BruteForceOptions options;
  options.grid_cap = 1000;
  CHECK_THROWS_AS(trc::brute_force(tmpl, data, Measure::StdDev, options), trc::Error);
}

TEST_CASE("DE on a singleton grid equals brute force") {
  const auto tmpl = trc::parse_rule_spec(R"({
    "classes": ["A", "B"], "default_class": "B", "compactness_attributes": ["x"],
    "aggregates": [{"name": "m", "source": "x", "kind": "mean"}],
    "params": [{"name": "p", "lower": 4, "upper": 4, "step": 1}],
    "rules": [{"class": "A", "combine": "all",
               "conditions": [{"attr": "m", "op": "<=", "param": "p"}]}]
  })");
  const auto data = trc_test::make_univariate({"a", "b", "c"}, {{1, 2}, {3, 3}, {8, 9}});
  const auto brute = trc::brute_force(tmpl, data, Measure::StdDev);
  trc::DeParams de;
  de.seed = 1;
  const auto heuristic = trc::differential_evolution(tmpl, data, Measure::StdDev, de);
  CHECK(heuristic.cost.total == brute.cost.total);
  CHECK(heuristic.candidate.values == brute.candidate.values);
  CHECK(heuristic.labeling.labels == brute.labeling.labels);
  CHECK(heuristic.ties == 1);
}

TEST_CASE("DE finds the student optimum and is seed-deterministic") {
  const auto fixture = trc_test::make_student_fixture();
  const auto tmpl = trc::parse_rule_spec(trc_test::student_rule_spec());
  const auto brute = trc::brute_force(tmpl, fixture.data, Measure::StdDev);

  trc::DeParams de;
  de.seed = 42;
  de.population_size = 20;
  de.generations = 50;
  const auto first = trc::differential_evolution(tmpl, fixture.data, Measure::StdDev, de);
  const auto second = trc::differential_evolution(tmpl, fixture.data, Measure::StdDev, de);

  CHECK(first.cost.total == brute.cost.total);
  CHECK(first.evaluated == 20 * 51);  // init + generations
  // Bit-identical rerun.
  CHECK(first.candidate.values == second.candidate.values);
  CHECK(first.cost.total == second.cost.total);
  CHECK(first.ties == second.ties);
  CHECK(first.labeling.labels == second.labeling.labels);
  CHECK(first.to_json() == second.to_json());
}

TEST_CASE("DE never beats brute force on shared instances") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    CAPTURE(seed);
    const auto instance = trc_test::make_random_instance(900 + seed, 600);
    const auto brute = trc::brute_force(instance.tmpl, instance.data, instance.measure);
    trc::DeParams de;
    de.seed = seed;
    const auto heuristic =
        trc::differential_evolution(instance.tmpl, instance.data, instance.measure, de);
    CHECK(heuristic.cost.total >= brute.cost.total);
  }
}

TEST_CASE("DE validates its parameters") {
  const auto fixture = trc_test::make_student_fixture();
  const auto tmpl = trc::parse_rule_spec(trc_test::student_rule_spec());
  trc::DeParams bad;
  bad.population_size = 3;
  CHECK_THROWS_AS(trc::differential_evolution(tmpl, fixture.data, Measure::StdDev, bad),
                  trc::Error);
  bad = {};
  bad.crossover_rate = 1.5;
  CHECK_THROWS_AS(trc::differential_evolution(tmpl, fixture.data, Measure::StdDev, bad),
                  trc::Error);
  bad = {};
  bad.differential_weight = 0.0;
  CHECK_THROWS_AS(trc::differential_evolution(tmpl, fixture.data, Measure::StdDev, bad),
                  trc::Error);
}

TEST_CASE("BestResult JSON carries bindings and labels") {
  const auto fixture = trc_test::make_student_fixture();
  const auto tmpl = trc::parse_rule_spec(trc_test::student_rule_spec());
  const auto best = trc::brute_force(tmpl, fixture.data, Measure::StdDev);
  const auto json_text = best.to_json(true);
  CHECK(json_text.find("\"p_hi\"") != std::string::npos);
  CHECK(json_text.find("\"cost_total\"") != std::string::npos);
  CHECK(json_text.find("\"cost_terms\"") != std::string::npos);
  CHECK(json_text.find("\"labels\"") != std::string::npos);
}
