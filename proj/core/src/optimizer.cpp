#include "trc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

#include <json.hpp>

#include "trc/error.hpp"
#include "trc/rng.hpp"

namespace trc {

std::string BestResult::to_json(bool include_cost_terms) const {
  nlohmann::json doc;
  nlohmann::json bindings;
  const auto& params = candidate.rule_template->params;
  for (std::size_t p = 0; p < params.size(); ++p) bindings[params[p].name] = candidate.values[p];
  doc["bindings"] = std::move(bindings);
  doc["cost_total"] = cost.total;
  doc["ties"] = ties;
  doc["evaluated"] = evaluated;
  nlohmann::json labels;
  for (std::size_t i = 0; i < labeling.object_ids.size(); ++i)
    labels[labeling.object_ids[i]] = labeling.labels[i];
  doc["labels"] = std::move(labels);
  if (include_cost_terms) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : cost.terms)
      terms.push_back({{"t", t.time},
                       {"class", t.class_name},
                       {"cm", t.cm},
                       {"size", t.size},
                       {"term", t.term}});
    doc["cost_terms"] = std::move(terms);
  }
  return doc.dump(2);
}

namespace {

struct SearchContext {
  AggregatedView view;
  CompiledRules compiled;
  CostEvaluator evaluator;
  std::size_t n_classes;

  SearchContext(const RuleTemplate& tmpl, const TemporalDataset& data, Measure measure)
      : view(aggregate(data, tmpl.aggregates)),
        compiled(tmpl, view),
        evaluator(data, measure, tmpl.compactness_attributes),
        n_classes(tmpl.classes.size()) {}
};

BestResult finish(const RuleTemplate& tmpl, const SearchContext& ctx,
                  std::vector<double> bindings, std::uint64_t evaluated, std::uint64_t ties) {
  CandidateClassifier winner{&tmpl, std::move(bindings)};
  Labeling labeling = classify(ctx.view, winner);
  std::vector<int> classes;
  ctx.compiled.apply(winner.values, classes);
  BestResult result{std::move(winner), ctx.evaluator.report(classes, tmpl.classes),
                    std::move(labeling), evaluated, ties};
  return result;
}

}  // namespace

BestResult brute_force(const RuleTemplate& tmpl, const TemporalDataset& data, Measure measure,
                       const BruteForceOptions& options) {
  const CandidateGrid grid = enumerate_candidates(tmpl, options.grid_cap);
  const std::uint64_t total_candidates = grid.size();
  SearchContext ctx(tmpl, data, measure);

  struct WorkerBest {
    double total = std::numeric_limits<double>::infinity();
    std::uint64_t index = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t ties = 0;
  };

  const unsigned max_useful =
      static_cast<unsigned>(std::min<std::uint64_t>(total_candidates, 256));
  const unsigned n_workers = std::clamp(options.workers, 1u, std::max(1u, max_useful));

  const auto& sizes = grid.grid_sizes();
  const std::size_t P = sizes.size();
  std::vector<WorkerBest> results(n_workers);
  auto run_range = [&](std::uint64_t begin, std::uint64_t end, WorkerBest& best) {
    CostEvaluator::Scratch scratch;
    std::vector<int> classes;
    // Odometer over grid indices, last parameter fastest: the same values
    // bindings_at() produces, without a per-candidate allocation.
    std::vector<std::uint64_t> digits(P);
    std::vector<double> bindings(P);
    std::uint64_t rem = begin;
    for (std::size_t p = P; p-- > 0;) {
      digits[p] = rem % sizes[p];
      rem /= sizes[p];
      bindings[p] = tmpl.params[p].grid_value(static_cast<std::size_t>(digits[p]));
    }
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      ctx.compiled.apply(bindings, classes);
      double total = ctx.evaluator.total(classes, ctx.n_classes, scratch);
      if (std::isnan(total)) total = std::numeric_limits<double>::infinity();
      if (total < best.total) {
        best.total = total;
        best.index = idx;
        best.ties = 1;
      } else if (total == best.total) {
        ++best.ties;
      }
      for (std::size_t p = P; p-- > 0;) {
        if (++digits[p] < sizes[p]) {
          bindings[p] = tmpl.params[p].grid_value(static_cast<std::size_t>(digits[p]));
          break;
        }
        digits[p] = 0;
        bindings[p] = tmpl.params[p].grid_value(0);
      }
    }
  };

  if (n_workers == 1) {
    run_range(0, total_candidates, results[0]);
  } else {
    std::vector<std::thread> threads;
    const std::uint64_t chunk = (total_candidates + n_workers - 1) / n_workers;
    for (unsigned w = 0; w < n_workers; ++w) {
      const std::uint64_t begin = std::min<std::uint64_t>(w * chunk, total_candidates);
      const std::uint64_t end = std::min<std::uint64_t>(begin + chunk, total_candidates);
      threads.emplace_back(run_range, begin, end, std::ref(results[w]));
    }
    for (auto& t : threads) t.join();
  }

  // Deterministic reduction: min by (total, candidate index). Candidate index
  // order equals lexicographic binding order, so ties resolve identically for
  // every worker count.
  WorkerBest merged;
  for (const auto& r : results) {
    if (r.ties == 0) continue;
    if (r.total < merged.total || (r.total == merged.total && r.index < merged.index)) {
      const std::uint64_t tie_acc = (r.total == merged.total) ? merged.ties : 0;
      merged.total = r.total;
      merged.index = r.index;
      merged.ties = r.ties + tie_acc;
    } else if (r.total == merged.total) {
      merged.ties += r.ties;
    }
  }

  return finish(tmpl, ctx, grid.bindings_at(merged.index), total_candidates, merged.ties);
}

namespace {

/// Nearest grid point with exact halves resolved toward the lower value.
double snap_to_grid(const ParamRange& range, double v, std::size_t grid_size) {
  if (v <= range.lower) return range.lower;
  const double q = (v - range.lower) / range.step;
  double k = std::floor(q);
  if (q - k > 0.5) k += 1.0;
  const auto ki = std::min<std::size_t>(static_cast<std::size_t>(k), grid_size - 1);
  return range.grid_value(ki);
}

}  // namespace

BestResult differential_evolution(const RuleTemplate& tmpl, const TemporalDataset& data,
                                  Measure measure, const DeParams& params) {
  if (params.population_size < 4)
    throw Error("InvalidParams", "DE population_size must be >= 4");
  if (params.generations < 1) throw Error("InvalidParams", "DE generations must be >= 1");
  if (!(params.differential_weight > 0.0) || params.differential_weight > 2.0)
    throw Error("InvalidParams", "DE differential_weight must be in (0, 2]");
  if (params.crossover_rate < 0.0 || params.crossover_rate > 1.0)
    throw Error("InvalidParams", "DE crossover_rate must be in [0, 1]");

  SearchContext ctx(tmpl, data, measure);
  const std::size_t P = tmpl.params.size();
  if (P == 0) {
    // Degenerate grid of one empty candidate; nothing to evolve.
    return finish(tmpl, ctx, {}, 1, 1);
  }
  std::vector<std::size_t> grid_sizes(P);
  for (std::size_t p = 0; p < P; ++p) grid_sizes[p] = tmpl.params[p].grid_size();

  Rng rng(params.seed);
  CostEvaluator::Scratch scratch;
  std::vector<int> classes;
  std::uint64_t evaluated = 0;

  std::vector<double> snapped(P);
  auto snap = [&](const std::vector<double>& v) {
    for (std::size_t p = 0; p < P; ++p) snapped[p] = snap_to_grid(tmpl.params[p], v[p], grid_sizes[p]);
  };
  auto evaluate = [&](const std::vector<double>& grid_point) {
    ctx.compiled.apply(grid_point, classes);
    ++evaluated;
    double total = ctx.evaluator.total(classes, ctx.n_classes, scratch);
    return std::isnan(total) ? std::numeric_limits<double>::infinity() : total;
  };

  double best_total = std::numeric_limits<double>::infinity();
  std::vector<double> best_bindings;
  std::set<std::vector<double>> minimal_bindings;
  auto consider = [&](double total) {
    if (total < best_total || (total == best_total && snapped < best_bindings)) {
      if (total < best_total) minimal_bindings.clear();
      best_total = total;
      best_bindings = snapped;
    }
    if (total == best_total) minimal_bindings.insert(snapped);
  };

  const std::size_t NP = params.population_size;
  std::vector<std::vector<double>> population(NP, std::vector<double>(P));
  std::vector<double> fitness(NP);
  for (std::size_t i = 0; i < NP; ++i) {
    for (std::size_t p = 0; p < P; ++p) {
      const auto& r = tmpl.params[p];
      population[i][p] = r.lower + rng.uniform01() * (r.upper - r.lower);
    }
    snap(population[i]);
    fitness[i] = evaluate(snapped);
    consider(fitness[i]);
  }

  const int np_top = static_cast<int>(NP) - 1;
  std::vector<double> trial(P);
  for (std::size_t g = 0; g < params.generations; ++g) {
    for (std::size_t i = 0; i < NP; ++i) {
      std::size_t r1, r2, r3;
      do r1 = static_cast<std::size_t>(rng.uniform_int(0, np_top)); while (r1 == i);
      do r2 = static_cast<std::size_t>(rng.uniform_int(0, np_top)); while (r2 == i || r2 == r1);
      do r3 = static_cast<std::size_t>(rng.uniform_int(0, np_top));
      while (r3 == i || r3 == r1 || r3 == r2);
      const auto j_rand = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(P) - 1));
      for (std::size_t p = 0; p < P; ++p) {
        const bool cross = rng.uniform01() < params.crossover_rate || p == j_rand;
        if (cross) {
          double v = population[r1][p] +
                     params.differential_weight * (population[r2][p] - population[r3][p]);
          const auto& r = tmpl.params[p];
          trial[p] = std::clamp(v, r.lower, r.upper);
        } else {
          trial[p] = population[i][p];
        }
      }
      snap(trial);
      const double trial_fitness = evaluate(snapped);
      consider(trial_fitness);
      if (trial_fitness <= fitness[i]) {
        population[i] = trial;
        fitness[i] = trial_fitness;
      }
    }
  }

  return finish(tmpl, ctx, best_bindings, evaluated, minimal_bindings.size());
}

}  // namespace trc
