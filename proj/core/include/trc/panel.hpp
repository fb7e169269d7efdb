#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace trc {

/// Complete panel: exactly one finite value for every (object, time,
/// attribute) triple, with unique object ids and strictly increasing time
/// points. Immutable after construction, safe to share across threads.
class TemporalDataset {
 public:
  TemporalDataset(std::vector<std::string> object_ids, std::vector<int> time_points,
                  std::vector<std::string> attribute_names, std::vector<double> values);

  std::size_t object_count() const { return object_ids_.size(); }
  std::size_t time_count() const { return time_points_.size(); }
  std::size_t attribute_count() const { return attribute_names_.size(); }

  const std::vector<std::string>& object_ids() const { return object_ids_; }
  const std::vector<int>& time_points() const { return time_points_; }
  const std::vector<std::string>& attribute_names() const { return attribute_names_; }

  /// Value by dense index; layout is object-major, then time, then attribute.
  double value(std::size_t object, std::size_t time, std::size_t attribute) const {
    return values_[(object * time_points_.size() + time) * attribute_names_.size() + attribute];
  }

  const std::vector<double>& raw_values() const { return values_; }

  std::optional<std::size_t> object_index(std::string_view id) const;
  std::optional<std::size_t> attribute_index(std::string_view name) const;

 private:
  std::vector<std::string> object_ids_;
  std::vector<int> time_points_;
  std::vector<std::string> attribute_names_;
  std::vector<double> values_;
  std::unordered_map<std::string, std::size_t> object_lookup_;
  std::unordered_map<std::string, std::size_t> attribute_lookup_;
};

/// One per-object scalar derived from a full time series.
struct AggregateSpec {
  enum class Kind { Mean, Min, Max, Median, Mode, StdDev, CountEq, CountLeq };

  std::string name;    // output column name, unique within a spec set
  std::string source;  // temporal attribute to aggregate
  Kind kind = Kind::Mean;
  double value = 0.0;  // comparison constant for CountEq / CountLeq

  static Kind kind_from_name(std::string_view name);
  static std::string_view kind_name(Kind kind);
  static bool kind_needs_value(Kind kind);
};

/// Per-object aggregate columns, all derived from one TemporalDataset.
struct AggregatedView {
  std::vector<std::string> object_ids;
  std::vector<std::string> column_names;
  std::vector<std::vector<double>> columns;  // columns[c][object]

  std::optional<std::size_t> column_index(std::string_view name) const;
  std::string to_csv() const;  // header: object_id,<column names...>
};

/// Loads a wide-format panel CSV with header `object_id,time,<attr...>`.
/// Rows may arrive in any order; the panel must be complete.
/// Throws Error kinds: IoError, CsvFormatError, NonNumericValue,
/// DuplicateRow, MissingCell, EmptyDataset.
TemporalDataset load_temporal_csv(const std::filesystem::path& path);

/// Writes the canonical panel CSV: objects in dataset order, times ascending.
void write_panel_csv(const TemporalDataset& data, const std::filesystem::path& path);

/// Computes each spec independently per object over that object's series.
/// Mode ties resolve to the smallest value; the median of an even-length
/// series is the mean of the two central values; the standard deviation is
/// the population form (divide by T). CountEq compares with absolute
/// tolerance 1e-9, CountLeq exactly, mirroring the rule engine's operators.
AggregatedView aggregate(const TemporalDataset& data, const std::vector<AggregateSpec>& specs);

/// Rescales each listed attribute to [0,1] by its global (min, max) over the
/// whole panel; a constant attribute maps to all zeros. Other attributes are
/// copied untouched.
TemporalDataset normalize_minmax(const TemporalDataset& data,
                                 const std::vector<std::string>& attributes);

}  // namespace trc
