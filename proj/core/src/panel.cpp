#include "trc/panel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "io_util.hpp"
#include "trc/error.hpp"

namespace trc {

TemporalDataset::TemporalDataset(std::vector<std::string> object_ids, std::vector<int> time_points,
                                 std::vector<std::string> attribute_names,
                                 std::vector<double> values)
    : object_ids_(std::move(object_ids)),
      time_points_(std::move(time_points)),
      attribute_names_(std::move(attribute_names)),
      values_(std::move(values)) {
  for (std::size_t i = 0; i < object_ids_.size(); ++i) {
    if (!object_lookup_.emplace(object_ids_[i], i).second)
      throw Error("InvalidDataset", "duplicate object id '" + object_ids_[i] + "'");
  }
  for (std::size_t i = 0; i + 1 < time_points_.size(); ++i) {
    if (time_points_[i] >= time_points_[i + 1])
      throw Error("InvalidDataset", "time points must be strictly increasing");
  }
  for (std::size_t i = 0; i < attribute_names_.size(); ++i) {
    if (!attribute_lookup_.emplace(attribute_names_[i], i).second)
      throw Error("InvalidDataset", "duplicate attribute '" + attribute_names_[i] + "'");
  }
  const std::size_t expected = object_ids_.size() * time_points_.size() * attribute_names_.size();
  if (values_.size() != expected)
    throw Error("InvalidDataset", "value buffer size does not match panel dimensions");
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error("InvalidDataset", "non-finite value in panel");
  }
}

std::optional<std::size_t> TemporalDataset::object_index(std::string_view id) const {
  auto it = object_lookup_.find(std::string(id));
  if (it == object_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> TemporalDataset::attribute_index(std::string_view name) const {
  auto it = attribute_lookup_.find(std::string(name));
  if (it == attribute_lookup_.end()) return std::nullopt;
  return it->second;
}

AggregateSpec::Kind AggregateSpec::kind_from_name(std::string_view name) {
  if (name == "mean") return Kind::Mean;
  if (name == "min") return Kind::Min;
  if (name == "max") return Kind::Max;
  if (name == "median") return Kind::Median;
  if (name == "mode") return Kind::Mode;
  if (name == "stddev") return Kind::StdDev;
  if (name == "count_eq") return Kind::CountEq;
  if (name == "count_leq") return Kind::CountLeq;
  throw Error("InvalidTemplate", "unknown aggregate kind '" + std::string(name) + "'");
}

std::string_view AggregateSpec::kind_name(Kind kind) {
  switch (kind) {
    case Kind::Mean: return "mean";
    case Kind::Min: return "min";
    case Kind::Max: return "max";
    case Kind::Median: return "median";
    case Kind::Mode: return "mode";
    case Kind::StdDev: return "stddev";
    case Kind::CountEq: return "count_eq";
    case Kind::CountLeq: return "count_leq";
  }
  return "?";
}

bool AggregateSpec::kind_needs_value(Kind kind) {
  return kind == Kind::CountEq || kind == Kind::CountLeq;
}

std::optional<std::size_t> AggregatedView::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < column_names.size(); ++i)
    if (column_names[i] == name) return i;
  return std::nullopt;
}

std::string AggregatedView::to_csv() const {
  std::string out = "object_id";
  for (const auto& name : column_names) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (std::size_t i = 0; i < object_ids.size(); ++i) {
    out += object_ids[i];
    for (const auto& col : columns) {
      out += ',';
      out += detail::format_double(col[i]);
    }
    out += '\n';
  }
  return out;
}

TemporalDataset load_temporal_csv(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw Error("EmptyDataset", "'" + path.string() + "' has no header");

  const auto header = detail::split_csv_line(lines[0]);
  if (header.size() < 3 || header[0] != "object_id" || header[1] != "time")
    throw Error("CsvFormatError",
                "header must be 'object_id,time,<attr...>' in '" + path.string() + "'");
  std::vector<std::string> attrs(header.begin() + 2, header.end());

  struct Row {
    std::size_t line_no;
    std::vector<double> values;
  };
  std::map<std::pair<std::string, int>, Row> rows;
  std::vector<std::string> object_order;
  std::set<std::string> seen_objects;
  std::set<int> times;

  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (detail::trim(lines[li]).empty()) continue;
    const auto fields = detail::split_csv_line(lines[li]);
    if (fields.size() != attrs.size() + 2)
      throw Error("CsvFormatError", "line " + std::to_string(li + 1) + ": expected " +
                                        std::to_string(attrs.size() + 2) + " fields, got " +
                                        std::to_string(fields.size()));
    std::string id(fields[0]);
    int t = 0;
    if (!detail::parse_int(fields[1], t))
      throw Error("NonNumericValue",
                  "line " + std::to_string(li + 1) + ": time '" + std::string(fields[1]) + "'");
    Row row;
    row.line_no = li + 1;
    row.values.reserve(attrs.size());
    for (std::size_t a = 0; a < attrs.size(); ++a) {
      double v = 0.0;
      if (!detail::parse_double(fields[a + 2], v))
        throw Error("NonNumericValue", "line " + std::to_string(li + 1) + ", column '" + attrs[a] +
                                           "': '" + std::string(fields[a + 2]) + "'");
      row.values.push_back(v);
    }
    auto key = std::make_pair(id, t);
    if (!rows.emplace(std::move(key), std::move(row)).second)
      throw Error("DuplicateRow",
                  "object '" + id + "', time " + std::to_string(t) + " appears twice");
    if (seen_objects.insert(id).second) object_order.push_back(id);
    times.insert(t);
  }

  if (rows.empty()) throw Error("EmptyDataset", "'" + path.string() + "' has no data rows");

  std::vector<int> time_points(times.begin(), times.end());
  const std::size_t T = time_points.size();
  const std::size_t A = attrs.size();
  std::vector<double> values(object_order.size() * T * A);
  for (std::size_t oi = 0; oi < object_order.size(); ++oi) {
    for (std::size_t ti = 0; ti < T; ++ti) {
      auto it = rows.find({object_order[oi], time_points[ti]});
      if (it == rows.end())
        throw Error("MissingCell", "object '" + object_order[oi] + "' has no row for time " +
                                       std::to_string(time_points[ti]));
      for (std::size_t a = 0; a < A; ++a) values[(oi * T + ti) * A + a] = it->second.values[a];
    }
  }

  return TemporalDataset(std::move(object_order), std::move(time_points), std::move(attrs),
                         std::move(values));
}

void write_panel_csv(const TemporalDataset& data, const std::filesystem::path& path) {
  std::string out = "object_id,time";
  for (const auto& a : data.attribute_names()) {
    out += ',';
    out += a;
  }
  out += '\n';
  for (std::size_t oi = 0; oi < data.object_count(); ++oi) {
    for (std::size_t ti = 0; ti < data.time_count(); ++ti) {
      out += data.object_ids()[oi];
      out += ',';
      out += std::to_string(data.time_points()[ti]);
      for (std::size_t a = 0; a < data.attribute_count(); ++a) {
        out += ',';
        out += detail::format_double(data.value(oi, ti, a));
      }
      out += '\n';
    }
  }
  detail::write_file(path, out);
}

namespace {

double series_mean(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double apply_kind(const AggregateSpec& spec, const std::vector<double>& xs) {
  switch (spec.kind) {
    case AggregateSpec::Kind::Mean:
      return series_mean(xs);
    case AggregateSpec::Kind::Min:
      return *std::min_element(xs.begin(), xs.end());
    case AggregateSpec::Kind::Max:
      return *std::max_element(xs.begin(), xs.end());
    case AggregateSpec::Kind::Median: {
      std::vector<double> sorted(xs);
      std::sort(sorted.begin(), sorted.end());
      const std::size_t n = sorted.size();
      if (n % 2 == 1) return sorted[n / 2];
      return (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
    }
    case AggregateSpec::Kind::Mode: {
      // Most frequent value; ties resolve to the smallest value.
      std::map<double, std::size_t> counts;
      for (double x : xs) ++counts[x];
      double best = xs[0];
      std::size_t best_count = 0;
      for (const auto& [value, count] : counts) {
        if (count > best_count) {
          best = value;
          best_count = count;
        }
      }
      return best;
    }
    case AggregateSpec::Kind::StdDev: {
      const double mean = series_mean(xs);
      double ss = 0.0;
      for (double x : xs) {
        const double d = x - mean;
        ss += d * d;
      }
      return std::sqrt(ss / static_cast<double>(xs.size()));
    }
    case AggregateSpec::Kind::CountEq: {
      std::size_t n = 0;
      for (double x : xs)
        if (std::fabs(x - spec.value) <= 1e-9) ++n;
      return static_cast<double>(n);
    }
    case AggregateSpec::Kind::CountLeq: {
      std::size_t n = 0;
      for (double x : xs)
        if (x <= spec.value) ++n;
      return static_cast<double>(n);
    }
  }
  return 0.0;
}

}  // namespace

AggregatedView aggregate(const TemporalDataset& data, const std::vector<AggregateSpec>& specs) {
  AggregatedView view;
  view.object_ids = data.object_ids();
  std::set<std::string> names;
  for (const auto& spec : specs) {
    if (!names.insert(spec.name).second)
      throw Error("InvalidTemplate", "duplicate aggregate name '" + spec.name + "'");
    const auto attr = data.attribute_index(spec.source);
    if (!attr)
      throw Error("UnknownAttribute", "aggregate '" + spec.name + "' reads missing attribute '" +
                                          spec.source + "'");
    std::vector<double> column(data.object_count());
    std::vector<double> series(data.time_count());
    for (std::size_t oi = 0; oi < data.object_count(); ++oi) {
      for (std::size_t ti = 0; ti < data.time_count(); ++ti) series[ti] = data.value(oi, ti, *attr);
      column[oi] = apply_kind(spec, series);
    }
    view.column_names.push_back(spec.name);
    view.columns.push_back(std::move(column));
  }
  return view;
}

TemporalDataset normalize_minmax(const TemporalDataset& data,
                                 const std::vector<std::string>& attributes) {
  std::vector<double> values = data.raw_values();
  const std::size_t T = data.time_count();
  const std::size_t A = data.attribute_count();
  for (const auto& name : attributes) {
    const auto attr = data.attribute_index(name);
    if (!attr) throw Error("UnknownAttribute", "cannot normalize missing attribute '" + name + "'");
    double lo = data.value(0, 0, *attr);
    double hi = lo;
    for (std::size_t oi = 0; oi < data.object_count(); ++oi) {
      for (std::size_t ti = 0; ti < T; ++ti) {
        const double v = data.value(oi, ti, *attr);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    for (std::size_t oi = 0; oi < data.object_count(); ++oi) {
      for (std::size_t ti = 0; ti < T; ++ti) {
        double& v = values[(oi * T + ti) * A + *attr];
        v = hi > lo ? (v - lo) / (hi - lo) : 0.0;
      }
    }
  }
  return TemporalDataset(data.object_ids(), data.time_points(), data.attribute_names(),
                         std::move(values));
}

}  // namespace trc
