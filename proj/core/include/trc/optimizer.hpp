#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trc/compactness.hpp"
#include "trc/panel.hpp"
#include "trc/rules.hpp"

namespace trc {

/// Winner of a search over the candidate grid.
struct BestResult {
  CandidateClassifier candidate;
  CostReport cost;
  Labeling labeling;
  std::uint64_t evaluated = 0;  // cost evaluations performed
  std::uint64_t ties = 1;       // candidates achieving the minimal cost

  /// {bindings, cost_total, ties, evaluated, labels}; terms included on request.
  std::string to_json(bool include_cost_terms = false) const;
};

struct BruteForceOptions {
  unsigned workers = 1;
  std::uint64_t grid_cap = kDefaultGridCap;
};

/// Evaluates every grid candidate and returns the minimal-cost one. Exact
/// ties resolve to the lexicographically smallest binding vector (equal to
/// first-in-enumeration-order), so the result is invariant under any worker
/// count. Throws Error("GridOverflow") when the grid exceeds the cap.
BestResult brute_force(const RuleTemplate& tmpl, const TemporalDataset& data, Measure measure,
                       const BruteForceOptions& options = {});

struct DeParams {
  std::size_t population_size = 20;  // >= 4
  std::size_t generations = 50;      // >= 1
  double differential_weight = 0.8;  // F in (0, 2]
  double crossover_rate = 0.9;       // CR in [0, 1]
  std::uint64_t seed = 0;
};

/// DE/rand/1/bin over the continuous parameter box; every trial vector is
/// snapped to its parameter grid (nearest point, ties toward lower) before
/// evaluation, so the search space is exactly the brute-force grid and the
/// returned cost can never beat it. Deterministic for a fixed seed.
BestResult differential_evolution(const RuleTemplate& tmpl, const TemporalDataset& data,
                                  Measure measure, const DeParams& params);

}  // namespace trc
