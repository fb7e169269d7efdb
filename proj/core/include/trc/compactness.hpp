#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "trc/panel.hpp"
#include "trc/rules.hpp"

namespace trc {

/// Per-time-point class compactness measures. All kinds are oriented so
/// smaller means more compact:
///   StdDev           mean over attributes of the population standard
///                    deviation of the class members.
///   CentroidDistance mean Euclidean distance of members to their centroid.
///   DunnInverse      1 / (Dunn + 1e-9), Dunn = min single-linkage
///                    inter-class distance / max class diameter; computed
///                    over the whole time-point partition and attributed to
///                    every non-empty class.
///   DaviesBouldin    mean over classes of max_j ((s_i + s_j) / d(c_i, c_j)),
///                    s = mean distance to centroid; partition-wide as above.
///   SilhouetteNeg    1 - mean silhouette (b - a) / max(a, b), range [0, 2];
///                    partition-wide as above.
/// The three partition-wide kinds need at least two non-empty classes at a
/// time point; otherwise that time point contributes 0. An empty class is 0;
/// singletons are 0 for StdDev and CentroidDistance.
enum class Measure { StdDev, CentroidDistance, DunnInverse, DaviesBouldin, SilhouetteNeg };

/// Accepts the CLI names stddev | centroid | dunn | db | silhouette.
Measure measure_from_name(std::string_view name);
std::string_view measure_name(Measure m);

/// One (time point, class) contribution to the total cost.
struct CostTerm {
  int time;                // actual time point value
  std::string class_name;  // from the labeling's class order
  double cm;               // compactness measure of this class at this time
  std::size_t size;        // class size (constant across time)
  double term;             // cm * size
};

struct CostReport {
  double total = 0.0;
  std::vector<CostTerm> terms;  // sorted by (time, class declaration order)

  std::string to_json() const;
};

/// Point set of one class at one time point: points[i][a] over the
/// compactness attributes.
using PointSet = std::vector<std::vector<double>>;

/// Compactness of one class given the whole partition at that time point
/// (context holds every class's points in declaration order; `points` must
/// be one of its entries for the partition-wide kinds).
double class_compactness(const PointSet& points, Measure measure,
                         const std::vector<PointSet>& context);

/// Precomputed column layout for repeated cost evaluation of labelings over
/// one dataset. When more than one compactness attribute is used the columns
/// are min-max normalized (unless disabled) so no attribute dominates the
/// distances.
class CostEvaluator {
 public:
  CostEvaluator(const TemporalDataset& data, Measure measure,
                const std::vector<std::string>& attributes, bool normalize = true);

  /// Reusable per-thread buffers for total().
  struct Scratch {
    std::vector<double> sum;
    std::vector<double> acc;
    std::vector<std::size_t> count;
    std::vector<PointSet> points;
  };

  std::size_t object_count() const { return n_objects_; }

  /// f(C): sum over time points and classes of compactness times class size.
  /// Terms accumulate in fixed (time, then class) order so totals are
  /// bit-reproducible regardless of caller-side parallelism.
  double total(const std::vector<int>& class_of_object, std::size_t n_classes,
               Scratch& scratch) const;
  double total(const std::vector<int>& class_of_object, std::size_t n_classes) const;

  CostReport report(const std::vector<int>& class_of_object,
                    const std::vector<std::string>& class_names) const;

 private:
  double partition_measure(const std::vector<PointSet>& points) const;

  Measure measure_;
  std::size_t n_objects_ = 0;
  std::vector<int> time_points_;
  std::vector<std::vector<double>> columns_;  // columns_[attr][time * n_objects + object]
};

/// Scores a labeling of the dataset: f(C) plus its per-(time, class)
/// decomposition, classes ordered as in labeling.classes.
/// Throws Error kinds: UnknownAttribute, IncompleteLabeling.
CostReport cost(const TemporalDataset& data, const Labeling& labeling, Measure measure,
                const std::vector<std::string>& attributes, bool normalize = true);

}  // namespace trc
