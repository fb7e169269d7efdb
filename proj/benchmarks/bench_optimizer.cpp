#include <benchmark/benchmark.h>

#include "trc/compactness.hpp"
#include "trc/optimizer.hpp"
#include "trc/pgg.hpp"
#include "trc/rules.hpp"

namespace {

trc::SimOutput make_panel() {
  trc::PggParams params;
  params.seed = 7;
  std::vector<trc::RosterEntry> roster = {
      {35, {trc::ArchetypeKind::FreeRider, 1.0, std::nullopt, 1.0, std::nullopt}},
      {35, {trc::ArchetypeKind::ConditionalCooperator, 4.0, std::nullopt, 1.0, 16.0}},
      {35, {trc::ArchetypeKind::TriangleContributor, 1.0, 4.0, 1.0, 10.0}},
      {35, {trc::ArchetypeKind::Random, 1.0, std::nullopt, 1.0, std::nullopt}},
  };
  return trc::simulate(params, roster);
}

trc::RuleTemplate make_template() {
  return trc::parse_rule_spec(R"({
    "classes": ["Low", "Mid", "High"],
    "default_class": "High",
    "compactness_attributes": ["contribution"],
    "aggregates": [{"name": "c_mean", "source": "contribution", "kind": "mean"}],
    "params": [
      {"name": "p_low", "lower": 0, "upper": 6, "step": 0.5},
      {"name": "p_mid", "lower": 4, "upper": 16, "step": 0.5}
    ],
    "rules": [
      {"class": "Low", "combine": "all", "conditions": [{"attr": "c_mean", "op": "<=", "param": "p_low"}]},
      {"class": "Mid", "combine": "all", "conditions": [{"attr": "c_mean", "op": "<=", "param": "p_mid"}]}
    ]
  })");
}

void BM_CostEvaluation(benchmark::State& state) {
  const auto sim = make_panel();
  trc::CostEvaluator evaluator(sim.panel, trc::Measure::StdDev, {"contribution"});
  std::vector<int> classes(sim.panel.object_count());
  for (std::size_t i = 0; i < classes.size(); ++i) classes[i] = static_cast<int>(i % 4);
  trc::CostEvaluator::Scratch scratch;
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluator.total(classes, 4, scratch));
  }
}
BENCHMARK(BM_CostEvaluation);

void BM_BruteForce(benchmark::State& state) {
  const auto sim = make_panel();
  const auto tmpl = make_template();
  trc::BruteForceOptions options;
  options.workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(trc::brute_force(tmpl, sim.panel, trc::Measure::StdDev, options));
  }
}
BENCHMARK(BM_BruteForce)->Arg(1)->Arg(2)->Arg(4);

void BM_DifferentialEvolution(benchmark::State& state) {
  const auto sim = make_panel();
  const auto tmpl = make_template();
  trc::DeParams de;
  de.seed = 42;
  for (auto _ : state) {
    benchmark::DoNotOptimize(trc::differential_evolution(tmpl, sim.panel, trc::Measure::StdDev, de));
  }
}
BENCHMARK(BM_DifferentialEvolution);

}  // namespace

BENCHMARK_MAIN();
