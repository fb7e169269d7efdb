#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "trc/compactness.hpp"
#include "trc/error.hpp"

using trc::Measure;
using trc::PointSet;

namespace {

PointSet univariate(std::initializer_list<double> xs) {
  PointSet out;
  for (double x : xs) out.push_back({x});
  return out;
}

trc::Labeling labeling_for(std::vector<std::string> ids, std::vector<std::string> labels,
                           std::vector<std::string> classes) {
  return trc::Labeling{std::move(ids), std::move(labels), std::move(classes)};
}

}  // namespace

TEST_CASE("class_compactness StdDev on hand fixtures") {
  CHECK(trc::class_compactness(univariate({5, 5, 5}), Measure::StdDev, {}) == 0.0);
  CHECK(trc::class_compactness(univariate({0, 2}), Measure::StdDev, {}) == 1.0);
  CHECK(trc::class_compactness({}, Measure::StdDev, {}) == 0.0);
  CHECK(trc::class_compactness(univariate({7}), Measure::StdDev, {}) == 0.0);
}

TEST_CASE("class_compactness CentroidDistance") {
  CHECK(trc::class_compactness(univariate({0, 2}), Measure::CentroidDistance, {}) == 1.0);
  CHECK(trc::class_compactness(univariate({4}), Measure::CentroidDistance, {}) == 0.0);
  // 2-D: points at the corners of a unit square, centroid distance is
  // sqrt(0.5) for each point.
  PointSet square = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  CHECK(trc::class_compactness(square, Measure::CentroidDistance, {}) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("Dunn index on the two-cluster fixture") {
  const std::vector<PointSet> context = {univariate({0, 1}), univariate({10, 11})};
  // min inter-gap 9, max diameter 1, Dunn 9 -> inverse 1/9 (epsilon-guarded).
  const double v = trc::class_compactness(context[0], Measure::DunnInverse, context);
  CHECK(v == doctest::Approx(1.0 / 9.0).epsilon(1e-9));
  CHECK(trc::class_compactness(context[1], Measure::DunnInverse, context) == v);
}

TEST_CASE("DaviesBouldin on a separated fixture") {
  // A = {0,2} (sigma 1, centroid 1), B = {10,12} (sigma 1, centroid 11),
  // d = 10 -> each R_i = 0.2 -> DB = 0.2.
  const std::vector<PointSet> context = {univariate({0, 2}), univariate({10, 12})};
  CHECK(trc::class_compactness(context[0], Measure::DaviesBouldin, context) ==
        doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("SilhouetteNeg on a separated fixture") {
  // Same fixture; silhouettes: 9/11, 7/9, 7/9, 9/11 -> mean 79/99.
  const std::vector<PointSet> context = {univariate({0, 2}), univariate({10, 12})};
  CHECK(trc::class_compactness(context[0], Measure::SilhouetteNeg, context) ==
        doctest::Approx(1.0 - 79.0 / 99.0).epsilon(1e-12));
}

TEST_CASE("partition-wide kinds need two populated classes") {
  const std::vector<PointSet> lone = {univariate({1, 2, 3}), {}};
  CHECK(trc::class_compactness(lone[0], Measure::DunnInverse, lone) == 0.0);
  CHECK(trc::class_compactness(lone[0], Measure::DaviesBouldin, lone) == 0.0);
  CHECK(trc::class_compactness(lone[0], Measure::SilhouetteNeg, lone) == 0.0);
}

TEST_CASE("identical points give a zero Dunn contribution") {
  const std::vector<PointSet> collapsed = {univariate({3, 3}), univariate({3, 3})};
  CHECK(trc::class_compactness(collapsed[0], Measure::DunnInverse, collapsed) == 0.0);
}

TEST_CASE("cost of per-class-constant data is zero") {
  const auto data = trc_test::make_univariate({"a", "b", "c", "d"},
                                              {{1, 2}, {1, 2}, {9, 8}, {9, 8}});
  const auto labeling = labeling_for({"a", "b", "c", "d"}, {"L", "L", "R", "R"}, {"L", "R"});
  const auto report = trc::cost(data, labeling, Measure::StdDev, {"x"});
  CHECK(report.total == 0.0);
}

TEST_CASE("cost matches the hand-computed {0,2} fixture") {
  const auto data = trc_test::make_univariate({"a", "b"}, {{0}, {2}});
  const auto labeling = labeling_for({"a", "b"}, {"C", "C"}, {"C"});
  const auto report = trc::cost(data, labeling, Measure::StdDev, {"x"});
  CHECK(report.total == 2.0);  // sd 1 * |c| 2
  REQUIRE(report.terms.size() == 1);
  CHECK(report.terms[0].cm == 1.0);
  CHECK(report.terms[0].size == 2);
}

TEST_CASE("cost report decomposition is consistent") {
  const auto data = trc_test::make_univariate(
      {"a", "b", "c", "d", "e"},
      {{1, 5, 2}, {2, 6, 1}, {8, 1, 9}, {9, 2, 8}, {9, 1, 9}});
  const auto labeling =
      labeling_for({"a", "b", "c", "d", "e"}, {"L", "L", "R", "R", "R"}, {"L", "R"});
  for (Measure m : {Measure::StdDev, Measure::CentroidDistance, Measure::DunnInverse,
                    Measure::DaviesBouldin, Measure::SilhouetteNeg}) {
    CAPTURE(trc::measure_name(m));
    const auto report = trc::cost(data, labeling, m, {"x"});
    double sum = 0.0;
    for (const auto& term : report.terms) {
      CHECK(term.term == term.cm * static_cast<double>(term.size));
      sum += term.term;
    }
    CHECK(report.total == doctest::Approx(sum).epsilon(1e-9));
    CHECK(report.total >= 0.0);
    CHECK(report.terms.size() == data.time_count() * 2);
  }
}

TEST_CASE("cost is invariant under class renaming") {
  const auto data = trc_test::make_univariate({"a", "b", "c"}, {{1, 2}, {5, 6}, {5, 7}});
  const auto original = labeling_for({"a", "b", "c"}, {"X", "Y", "Y"}, {"X", "Y"});
  const auto renamed = labeling_for({"a", "b", "c"}, {"QQ", "ZZ", "ZZ"}, {"QQ", "ZZ"});
  for (Measure m : {Measure::StdDev, Measure::CentroidDistance, Measure::DunnInverse}) {
    CHECK(trc::cost(data, original, m, {"x"}).total == trc::cost(data, renamed, m, {"x"}).total);
  }
}

TEST_CASE("scaling one attribute scales the unnormalized StdDev cost linearly") {
  const auto base = trc_test::make_univariate({"a", "b", "c", "d"},
                                              {{1, 4}, {3, 8}, {7, 2}, {9, 5}});
  std::vector<std::vector<double>> scaled_series = {{2, 8}, {6, 16}, {14, 4}, {18, 10}};
  const auto scaled = trc_test::make_univariate({"a", "b", "c", "d"}, scaled_series);
  const auto labeling = labeling_for({"a", "b", "c", "d"}, {"L", "L", "R", "R"}, {"L", "R"});
  const double c1 = trc::cost(base, labeling, Measure::StdDev, {"x"}, false).total;
  const double c2 = trc::cost(scaled, labeling, Measure::StdDev, {"x"}, false).total;
  CHECK(c2 == doctest::Approx(2.0 * c1).epsilon(1e-12));
}

TEST_CASE("multi-attribute cost normalizes so attributes weigh comparably") {
  // Second attribute is the first scaled by 1000; after min-max
  // normalization both carry identical information, so the cost equals twice
  // the... exactly the single-attribute normalized cost.
  std::vector<std::vector<std::vector<double>>> values;
  for (int i = 0; i < 4; ++i) {
    const double x = static_cast<double>(i * i + 1);
    values.push_back({{x, 1000.0 * x}, {x + 1.0, 1000.0 * (x + 1.0)}});
  }
  const auto data = trc_test::make_dataset({"a", "b", "c", "d"}, {1, 2}, {"x", "y"}, values);
  const auto labeling = labeling_for({"a", "b", "c", "d"}, {"L", "L", "R", "R"}, {"L", "R"});
  const auto normalized_x = trc::normalize_minmax(data, {"x"});
  const double single = trc::cost(normalized_x, labeling, Measure::StdDev, {"x"}, false).total;
  const double both = trc::cost(data, labeling, Measure::StdDev, {"x", "y"}).total;
  CHECK(both == doctest::Approx(single).epsilon(1e-9));
}

TEST_CASE("moving an object into a matching constant class cannot raise StdDev cost") {
  const auto data = trc_test::make_univariate({"a", "b", "c", "d", "e"},
                                              {{4, 4}, {4, 4}, {4, 4}, {9, 9}, {9, 9}});
  const auto before = labeling_for({"a", "b", "c", "d", "e"},
                                   {"L", "L", "R", "R", "R"}, {"L", "R"});
  const auto after = labeling_for({"a", "b", "c", "d", "e"},
                                  {"L", "L", "L", "R", "R"}, {"L", "R"});
  const double cost_before = trc::cost(data, before, Measure::StdDev, {"x"}).total;
  const double cost_after = trc::cost(data, after, Measure::StdDev, {"x"}).total;
  CHECK(cost_after <= cost_before);
}

TEST_CASE("cost validates labelings and attributes") {
  const auto data = trc_test::make_univariate({"a", "b"}, {{1}, {2}});
  const auto partial = labeling_for({"a"}, {"C"}, {"C"});
  CHECK_THROWS_WITH_AS(trc::cost(data, partial, Measure::StdDev, {"x"}), doctest::Contains("IncompleteLabeling"),
                       trc::Error);
  const auto full = labeling_for({"a", "b"}, {"C", "C"}, {"C"});
  CHECK_THROWS_WITH_AS(trc::cost(data, full, Measure::StdDev, {"nope"}),
                       doctest::Contains("UnknownAttribute"), trc::Error);
}

TEST_CASE("CostReport JSON lists terms in (time, class) order") {
  const auto data = trc_test::make_univariate({"a", "b"}, {{0, 1}, {2, 3}});
  const auto labeling = labeling_for({"a", "b"}, {"C", "D"}, {"C", "D"});
  const auto report = trc::cost(data, labeling, Measure::StdDev, {"x"});
  REQUIRE(report.terms.size() == 4);
  CHECK(report.terms[0].time == 1);
  CHECK(report.terms[0].class_name == "C");
  CHECK(report.terms[1].class_name == "D");
  CHECK(report.terms[2].time == 2);
  const auto json_text = report.to_json();
  CHECK(json_text.find("\"total\"") != std::string::npos);
  CHECK(json_text.find("\"terms\"") != std::string::npos);
}

TEST_CASE("measure names round-trip") {
  for (Measure m : {Measure::StdDev, Measure::CentroidDistance, Measure::DunnInverse,
                    Measure::DaviesBouldin, Measure::SilhouetteNeg})
    CHECK(trc::measure_from_name(trc::measure_name(m)) == m);
  CHECK_THROWS_AS(trc::measure_from_name("bogus"), trc::Error);
}
