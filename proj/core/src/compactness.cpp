#include "trc/compactness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include <json.hpp>

#include "io_util.hpp"
#include "trc/error.hpp"

namespace trc {

Measure measure_from_name(std::string_view name) {
  if (name == "stddev") return Measure::StdDev;
  if (name == "centroid") return Measure::CentroidDistance;
  if (name == "dunn") return Measure::DunnInverse;
  if (name == "db") return Measure::DaviesBouldin;
  if (name == "silhouette") return Measure::SilhouetteNeg;
  throw Error("InvalidMeasure", "unknown measure '" + std::string(name) +
                                    "'; expected stddev|centroid|dunn|db|silhouette");
}

std::string_view measure_name(Measure m) {
  switch (m) {
    case Measure::StdDev: return "stddev";
    case Measure::CentroidDistance: return "centroid";
    case Measure::DunnInverse: return "dunn";
    case Measure::DaviesBouldin: return "db";
    case Measure::SilhouetteNeg: return "silhouette";
  }
  return "?";
}

std::string CostReport::to_json() const {
  nlohmann::json doc;
  doc["total"] = total;
  nlohmann::json terms_json = nlohmann::json::array();
  for (const auto& t : terms) {
    terms_json.push_back({{"t", t.time},
                          {"class", t.class_name},
                          {"cm", t.cm},
                          {"size", t.size},
                          {"term", t.term}});
  }
  doc["terms"] = std::move(terms_json);
  return doc.dump(2);
}

namespace {

constexpr double kEps = 1e-9;

double point_distance(const std::vector<double>& x, const std::vector<double>& y) {
  double d2 = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    const double d = x[a] - y[a];
    d2 += d * d;
  }
  return std::sqrt(d2);
}

double stddev_of(const PointSet& points) {
  if (points.size() <= 1) return 0.0;
  const std::size_t n_attrs = points[0].size();
  const double n = static_cast<double>(points.size());
  double cm = 0.0;
  for (std::size_t a = 0; a < n_attrs; ++a) {
    double sum = 0.0;
    for (const auto& p : points) sum += p[a];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& p : points) {
      const double d = p[a] - mean;
      ss += d * d;
    }
    cm += std::sqrt(ss / n);
  }
  return cm / static_cast<double>(n_attrs);
}

std::vector<double> centroid_of(const PointSet& points) {
  const std::size_t n_attrs = points[0].size();
  std::vector<double> c(n_attrs, 0.0);
  for (const auto& p : points)
    for (std::size_t a = 0; a < n_attrs; ++a) c[a] += p[a];
  for (double& v : c) v /= static_cast<double>(points.size());
  return c;
}

double centroid_distance_of(const PointSet& points) {
  if (points.size() <= 1) return 0.0;
  const auto c = centroid_of(points);
  double acc = 0.0;
  for (const auto& p : points) acc += point_distance(p, c);
  return acc / static_cast<double>(points.size());
}

/// Partition-wide index value shared by every non-empty class at one time
/// point; 0 when fewer than two classes are populated.
double partition_index(const std::vector<PointSet>& partition, Measure measure) {
  std::vector<std::size_t> populated;
  for (std::size_t n = 0; n < partition.size(); ++n)
    if (!partition[n].empty()) populated.push_back(n);
  if (populated.size() < 2) return 0.0;

  switch (measure) {
    case Measure::DunnInverse: {
      double max_diameter = 0.0;
      for (std::size_t n : populated) {
        const auto& pts = partition[n];
        for (std::size_t i = 0; i < pts.size(); ++i)
          for (std::size_t j = i + 1; j < pts.size(); ++j)
            max_diameter = std::max(max_diameter, point_distance(pts[i], pts[j]));
      }
      double gap = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < populated.size(); ++a) {
        for (std::size_t b = a + 1; b < populated.size(); ++b) {
          for (const auto& p : partition[populated[a]])
            for (const auto& q : partition[populated[b]])
              gap = std::min(gap, point_distance(p, q));
        }
      }
      if (max_diameter == 0.0) return 0.0;  // every class collapsed to a point
      const double dunn = gap / max_diameter;
      return 1.0 / (dunn + kEps);
    }
    case Measure::DaviesBouldin: {
      std::vector<std::vector<double>> centroids;
      std::vector<double> sigma;
      for (std::size_t n : populated) {
        centroids.push_back(centroid_of(partition[n]));
        double acc = 0.0;
        for (const auto& p : partition[n]) acc += point_distance(p, centroids.back());
        sigma.push_back(acc / static_cast<double>(partition[n].size()));
      }
      double total = 0.0;
      for (std::size_t i = 0; i < populated.size(); ++i) {
        double worst = 0.0;
        for (std::size_t j = 0; j < populated.size(); ++j) {
          if (i == j) continue;
          const double d = point_distance(centroids[i], centroids[j]);
          worst = std::max(worst, (sigma[i] + sigma[j]) / std::max(d, kEps));
        }
        total += worst;
      }
      return total / static_cast<double>(populated.size());
    }
    case Measure::SilhouetteNeg: {
      double total_s = 0.0;
      std::size_t n_points = 0;
      for (std::size_t n : populated) {
        const auto& own = partition[n];
        for (std::size_t i = 0; i < own.size(); ++i) {
          double s = 0.0;
          if (own.size() > 1) {
            double a_acc = 0.0;
            for (std::size_t j = 0; j < own.size(); ++j)
              if (j != i) a_acc += point_distance(own[i], own[j]);
            const double a = a_acc / static_cast<double>(own.size() - 1);
            double b = std::numeric_limits<double>::infinity();
            for (std::size_t m : populated) {
              if (m == n) continue;
              double acc = 0.0;
              for (const auto& q : partition[m]) acc += point_distance(own[i], q);
              b = std::min(b, acc / static_cast<double>(partition[m].size()));
            }
            const double denom = std::max(a, b);
            s = denom == 0.0 ? 0.0 : (b - a) / denom;
          }
          total_s += s;
          ++n_points;
        }
      }
      return 1.0 - total_s / static_cast<double>(n_points);
    }
    default:
      return 0.0;
  }
}

bool is_partition_measure(Measure m) {
  return m == Measure::DunnInverse || m == Measure::DaviesBouldin ||
         m == Measure::SilhouetteNeg;
}

}  // namespace

double class_compactness(const PointSet& points, Measure measure,
                         const std::vector<PointSet>& context) {
  if (points.empty()) return 0.0;
  switch (measure) {
    case Measure::StdDev: return stddev_of(points);
    case Measure::CentroidDistance: return centroid_distance_of(points);
    default: return partition_index(context, measure);
  }
}

CostEvaluator::CostEvaluator(const TemporalDataset& data, Measure measure,
                             const std::vector<std::string>& attributes, bool normalize)
    : measure_(measure), n_objects_(data.object_count()), time_points_(data.time_points()) {
  if (attributes.empty()) throw Error("UnknownAttribute", "no compactness attributes given");
  const std::size_t T = data.time_count();
  for (const auto& name : attributes) {
    const auto attr = data.attribute_index(name);
    if (!attr) throw Error("UnknownAttribute", "compactness attribute '" + name + "' not in data");
    std::vector<double> column(T * n_objects_);
    for (std::size_t ti = 0; ti < T; ++ti)
      for (std::size_t i = 0; i < n_objects_; ++i) column[ti * n_objects_ + i] = data.value(i, ti, *attr);
    if (normalize && attributes.size() > 1) {
      const auto [lo_it, hi_it] = std::minmax_element(column.begin(), column.end());
      const double lo = *lo_it, hi = *hi_it;
      for (double& v : column) v = hi > lo ? (v - lo) / (hi - lo) : 0.0;
    }
    columns_.push_back(std::move(column));
  }
}

double CostEvaluator::total(const std::vector<int>& class_of_object, std::size_t n_classes,
                            Scratch& scratch) const {
  const std::size_t A = columns_.size();
  const std::size_t T = time_points_.size();
  const std::size_t P = n_objects_;

  auto& count = scratch.count;
  count.assign(n_classes, 0);
  for (int c : class_of_object) ++count[static_cast<std::size_t>(c)];

  double total = 0.0;

  if (measure_ == Measure::StdDev || measure_ == Measure::CentroidDistance) {
    auto& sum = scratch.sum;
    auto& acc = scratch.acc;
    sum.assign(A * n_classes, 0.0);
    acc.assign(A * n_classes, 0.0);

    for (std::size_t ti = 0; ti < T; ++ti) {
      std::fill(sum.begin(), sum.end(), 0.0);
      for (std::size_t a = 0; a < A; ++a) {
        const double* col = columns_[a].data() + ti * P;
        double* s = sum.data() + a * n_classes;
        for (std::size_t i = 0; i < P; ++i) s[static_cast<std::size_t>(class_of_object[i])] += col[i];
      }
      // sum now holds per-(attr, class) means
      for (std::size_t a = 0; a < A; ++a)
        for (std::size_t n = 0; n < n_classes; ++n)
          if (count[n] > 0) sum[a * n_classes + n] /= static_cast<double>(count[n]);

      if (measure_ == Measure::StdDev) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t a = 0; a < A; ++a) {
          const double* col = columns_[a].data() + ti * P;
          const double* mean = sum.data() + a * n_classes;
          double* ss = acc.data() + a * n_classes;
          for (std::size_t i = 0; i < P; ++i) {
            const auto n = static_cast<std::size_t>(class_of_object[i]);
            const double d = col[i] - mean[n];
            ss[n] += d * d;
          }
        }
        for (std::size_t n = 0; n < n_classes; ++n) {
          if (count[n] == 0) continue;
          double cm = 0.0;
          for (std::size_t a = 0; a < A; ++a)
            cm += std::sqrt(acc[a * n_classes + n] / static_cast<double>(count[n]));
          cm /= static_cast<double>(A);
          total += cm * static_cast<double>(count[n]);
        }
      } else {
        // CentroidDistance: one pass accumulating each member's distance.
        std::fill(acc.begin(), acc.begin() + static_cast<std::ptrdiff_t>(n_classes), 0.0);
        for (std::size_t i = 0; i < P; ++i) {
          const auto n = static_cast<std::size_t>(class_of_object[i]);
          double d2 = 0.0;
          for (std::size_t a = 0; a < A; ++a) {
            const double d = columns_[a][ti * P + i] - sum[a * n_classes + n];
            d2 += d * d;
          }
          acc[n] += std::sqrt(d2);
        }
        for (std::size_t n = 0; n < n_classes; ++n) {
          if (count[n] == 0) continue;
          const double cm = acc[n] / static_cast<double>(count[n]);
          total += cm * static_cast<double>(count[n]);
        }
      }
    }
    return total;
  }

  // Partition-wide index kinds: gather point sets per class at each time.
  auto& points = scratch.points;
  points.assign(n_classes, PointSet{});
  for (std::size_t ti = 0; ti < T; ++ti) {
    for (auto& ps : points) ps.clear();
    for (std::size_t i = 0; i < P; ++i) {
      std::vector<double> p(A);
      for (std::size_t a = 0; a < A; ++a) p[a] = columns_[a][ti * P + i];
      points[static_cast<std::size_t>(class_of_object[i])].push_back(std::move(p));
    }
    const double index_value = partition_index(points, measure_);
    for (std::size_t n = 0; n < n_classes; ++n) {
      if (count[n] == 0) continue;
      total += index_value * static_cast<double>(count[n]);
    }
  }
  return total;
}

double CostEvaluator::total(const std::vector<int>& class_of_object,
                            std::size_t n_classes) const {
  Scratch scratch;
  return total(class_of_object, n_classes, scratch);
}

CostReport CostEvaluator::report(const std::vector<int>& class_of_object,
                                 const std::vector<std::string>& class_names) const {
  const std::size_t A = columns_.size();
  const std::size_t T = time_points_.size();
  const std::size_t P = n_objects_;
  const std::size_t N = class_names.size();

  std::vector<std::size_t> count(N, 0);
  for (int c : class_of_object) ++count[static_cast<std::size_t>(c)];

  CostReport report;
  std::vector<PointSet> points(N);
  for (std::size_t ti = 0; ti < T; ++ti) {
    for (auto& ps : points) ps.clear();
    for (std::size_t i = 0; i < P; ++i) {
      std::vector<double> p(A);
      for (std::size_t a = 0; a < A; ++a) p[a] = columns_[a][ti * P + i];
      points[static_cast<std::size_t>(class_of_object[i])].push_back(std::move(p));
    }
    const bool partition_wide = is_partition_measure(measure_);
    const double index_value = partition_wide ? partition_index(points, measure_) : 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      double cm = 0.0;
      if (count[n] > 0) {
        if (partition_wide)
          cm = index_value;
        else if (measure_ == Measure::StdDev)
          cm = stddev_of(points[n]);
        else
          cm = centroid_distance_of(points[n]);
      }
      const double term = cm * static_cast<double>(count[n]);
      report.terms.push_back({time_points_[ti], class_names[n], cm, count[n], term});
      report.total += term;
    }
  }
  return report;
}

CostReport cost(const TemporalDataset& data, const Labeling& labeling, Measure measure,
                const std::vector<std::string>& attributes, bool normalize) {
  if (labeling.object_ids.size() != data.object_count())
    throw Error("IncompleteLabeling",
                "labeling covers " + std::to_string(labeling.object_ids.size()) +
                    " objects, dataset has " + std::to_string(data.object_count()));
  std::unordered_map<std::string, std::size_t> class_lookup;
  for (std::size_t n = 0; n < labeling.classes.size(); ++n)
    class_lookup.emplace(labeling.classes[n], n);
  std::unordered_map<std::string, std::string> label_lookup;
  for (std::size_t i = 0; i < labeling.object_ids.size(); ++i) {
    if (!data.object_index(labeling.object_ids[i]))
      throw Error("IncompleteLabeling",
                  "labeled object '" + labeling.object_ids[i] + "' is not in the dataset");
    label_lookup.emplace(labeling.object_ids[i], labeling.labels[i]);
  }

  std::vector<int> class_of_object(data.object_count());
  for (std::size_t i = 0; i < data.object_count(); ++i) {
    auto it = label_lookup.find(data.object_ids()[i]);
    if (it == label_lookup.end())
      throw Error("IncompleteLabeling", "object '" + data.object_ids()[i] + "' has no label");
    auto cit = class_lookup.find(it->second);
    if (cit == class_lookup.end())
      throw Error("UnknownClass", "label '" + it->second + "' missing from class list");
    class_of_object[i] = static_cast<int>(cit->second);
  }

  CostEvaluator evaluator(data, measure, attributes, normalize);
  return evaluator.report(class_of_object, labeling.classes);
}

}  // namespace trc
