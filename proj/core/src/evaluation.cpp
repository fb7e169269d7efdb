#include "trc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include <json.hpp>

#include "io_util.hpp"
#include "trc/error.hpp"
#include "trc/rng.hpp"

namespace trc {

namespace {

std::string percent_1dp(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

std::unordered_map<std::string, std::string> label_map(const Labeling& l) {
  std::unordered_map<std::string, std::string> m;
  for (std::size_t i = 0; i < l.object_ids.size(); ++i) m.emplace(l.object_ids[i], l.labels[i]);
  return m;
}

void require_same_objects(const Labeling& a, const Labeling& b) {
  if (a.object_ids.size() != b.object_ids.size())
    throw Error("ObjectSetMismatch", "labelings cover " + std::to_string(a.object_ids.size()) +
                                         " vs " + std::to_string(b.object_ids.size()) + " objects");
  std::set<std::string> sa(a.object_ids.begin(), a.object_ids.end());
  for (const auto& id : b.object_ids)
    if (!sa.count(id))
      throw Error("ObjectSetMismatch", "object '" + id + "' is only in one labeling");
}

}  // namespace

AgreementMatrix agreement_matrix(const Labeling& a, const Labeling& b) {
  require_same_objects(a, b);
  const auto b_labels = label_map(b);

  AgreementMatrix m;
  m.row_classes = a.classes;
  m.col_classes = b.classes;
  m.cells.assign(a.classes.size(), std::vector<double>(b.classes.size(), 0.0));
  m.empty_row.assign(a.classes.size(), false);

  std::unordered_map<std::string, std::size_t> row_of, col_of;
  for (std::size_t i = 0; i < a.classes.size(); ++i) row_of[a.classes[i]] = i;
  for (std::size_t j = 0; j < b.classes.size(); ++j) col_of[b.classes[j]] = j;

  std::vector<std::size_t> row_total(a.classes.size(), 0);
  std::vector<std::vector<std::size_t>> joint(a.classes.size(),
                                              std::vector<std::size_t>(b.classes.size(), 0));
  for (std::size_t i = 0; i < a.object_ids.size(); ++i) {
    const std::size_t r = row_of.at(a.labels[i]);
    const std::size_t c = col_of.at(b_labels.at(a.object_ids[i]));
    ++row_total[r];
    ++joint[r][c];
  }
  for (std::size_t r = 0; r < a.classes.size(); ++r) {
    if (row_total[r] == 0) {
      m.empty_row[r] = true;
      continue;
    }
    for (std::size_t c = 0; c < b.classes.size(); ++c)
      m.cells[r][c] = 100.0 * static_cast<double>(joint[r][c]) / static_cast<double>(row_total[r]);
  }
  return m;
}

std::string AgreementMatrix::to_json() const {
  nlohmann::json doc;
  doc["row_classes"] = row_classes;
  doc["col_classes"] = col_classes;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < cells.size(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    // Same one-decimal rounding as the text rendering, so both exports agree.
    for (double v : cells[r]) row.push_back(std::strtod(percent_1dp(v).c_str(), nullptr));
    rows.push_back(std::move(row));
  }
  doc["cells"] = std::move(rows);
  doc["empty_rows"] = empty_row;
  return doc.dump(2);
}

std::string AgreementMatrix::to_text() const {
  std::size_t width = 8;
  for (const auto& c : col_classes) width = std::max(width, c.size() + 2);
  for (const auto& r : row_classes) width = std::max(width, r.size() + 2);

  auto pad = [&](const std::string& s) {
    std::string out = s;
    while (out.size() < width) out = ' ' + out;
    return out;
  };

  std::string out = pad("");
  for (const auto& c : col_classes) out += pad(c);
  out += '\n';
  for (std::size_t r = 0; r < row_classes.size(); ++r) {
    out += pad(row_classes[r]);
    for (double v : cells[r]) out += pad(percent_1dp(v));
    if (empty_row[r]) out += "  (empty)";
    out += '\n';
  }
  return out;
}

double label_agreement(const Labeling& a, const Labeling& b) {
  require_same_objects(a, b);
  const auto b_labels = label_map(b);
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.object_ids.size(); ++i)
    if (a.labels[i] == b_labels.at(a.object_ids[i])) ++same;
  return static_cast<double>(same) / static_cast<double>(a.object_ids.size());
}

double pairwise_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
  std::size_t n_pos = 0;
  for (bool p : positive)
    if (p) ++n_pos;
  const std::size_t n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw Error("DegenerateClass", "pairwise AUC needs both positive and negative examples");

  // Midrank assignment over the pooled scores.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t l, std::size_t r) { return scores[l] < scores[r]; });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t)
      if (positive[order[t]]) rank_sum_pos += midrank;
    i = j + 1;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

double hand_till_auc(const ProbeScores& scores, const Labeling& truth) {
  std::unordered_map<std::string, std::size_t> object_row;
  for (std::size_t i = 0; i < scores.object_ids.size(); ++i)
    object_row.emplace(scores.object_ids[i], i);

  // Classes present in the truth restricted to scored objects, truth order.
  std::vector<std::string> present;
  std::vector<std::vector<std::size_t>> members;  // rows into scores, per class
  for (const auto& cls : truth.classes) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < truth.object_ids.size(); ++i) {
      if (truth.labels[i] != cls) continue;
      auto it = object_row.find(truth.object_ids[i]);
      if (it != object_row.end()) rows.push_back(it->second);
    }
    if (!rows.empty()) {
      present.push_back(cls);
      members.push_back(std::move(rows));
    }
  }
  const std::size_t c = present.size();
  if (c < 2) throw Error("DegenerateClass", "multiclass AUC needs at least two populated classes");

  auto score_column = [&](const std::string& cls) -> std::optional<std::size_t> {
    for (std::size_t k = 0; k < scores.classes.size(); ++k)
      if (scores.classes[k] == cls) return k;
    return std::nullopt;
  };

  double pair_sum = 0.0;
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = i + 1; j < c; ++j) {
      std::vector<std::size_t> pooled;
      pooled.insert(pooled.end(), members[i].begin(), members[i].end());
      pooled.insert(pooled.end(), members[j].begin(), members[j].end());

      auto one_direction = [&](const std::string& pos_class,
                               const std::vector<std::size_t>& pos_rows) {
        const auto col = score_column(pos_class);
        std::vector<double> s(pooled.size());
        std::vector<bool> is_pos(pooled.size(), false);
        std::set<std::size_t> pos_set(pos_rows.begin(), pos_rows.end());
        for (std::size_t t = 0; t < pooled.size(); ++t) {
          s[t] = col ? scores.scores[pooled[t]][*col] : 0.0;
          is_pos[t] = pos_set.count(pooled[t]) > 0;
        }
        return pairwise_auc(s, is_pos);
      };

      const double a_ij = one_direction(present[i], members[i]);
      const double a_ji = one_direction(present[j], members[j]);
      pair_sum += (a_ij + a_ji) / 2.0;
    }
  }
  // 2 / (c (c-1)) * sum, written as sum / #pairs so the all-ties case stays
  // exactly one half.
  const double n_pairs = static_cast<double>(c * (c - 1) / 2);
  return pair_sum / n_pairs;
}

ProbeScores knn_probe(const FeatureMatrix& train, const std::vector<std::string>& train_labels,
                      const FeatureMatrix& test, std::size_t k) {
  if (train.rows.empty()) throw Error("EmptyTrain", "probe needs at least one training object");
  if (k < 1 || k > train.rows.size())
    throw Error("BadK", "k must be in [1, " + std::to_string(train.rows.size()) + "]");
  if (train_labels.size() != train.rows.size())
    throw Error("InvalidParams", "one label per training row required");

  const std::size_t n_features = train.feature_names.size();
  std::vector<double> lo(n_features), hi(n_features);
  for (std::size_t f = 0; f < n_features; ++f) {
    lo[f] = hi[f] = train.rows[0][f];
    for (const auto& row : train.rows) {
      lo[f] = std::min(lo[f], row[f]);
      hi[f] = std::max(hi[f], row[f]);
    }
  }
  auto normalize_row = [&](const std::vector<double>& row) {
    std::vector<double> out(n_features);
    for (std::size_t f = 0; f < n_features; ++f)
      out[f] = hi[f] > lo[f] ? (row[f] - lo[f]) / (hi[f] - lo[f]) : 0.0;
    return out;
  };

  std::vector<std::vector<double>> train_norm;
  train_norm.reserve(train.rows.size());
  for (const auto& row : train.rows) train_norm.push_back(normalize_row(row));

  ProbeScores out;
  out.object_ids = test.object_ids;
  for (const auto& label : train_labels) {
    if (std::find(out.classes.begin(), out.classes.end(), label) == out.classes.end())
      out.classes.push_back(label);
  }
  std::unordered_map<std::string, std::size_t> class_col;
  for (std::size_t i = 0; i < out.classes.size(); ++i) class_col[out.classes[i]] = i;

  std::vector<std::size_t> order(train.rows.size());
  for (const auto& test_row : test.rows) {
    const auto q = normalize_row(test_row);
    std::vector<double> dist(train.rows.size());
    for (std::size_t i = 0; i < train.rows.size(); ++i) {
      double d2 = 0.0;
      for (std::size_t f = 0; f < n_features; ++f) {
        const double d = q[f] - train_norm[i][f];
        d2 += d * d;
      }
      dist[i] = d2;
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
      if (dist[l] != dist[r]) return dist[l] < dist[r];
      return train.object_ids[l] < train.object_ids[r];
    });
    std::vector<double> votes(out.classes.size(), 0.0);
    for (std::size_t i = 0; i < k; ++i) votes[class_col.at(train_labels[order[i]])] += 1.0;
    for (double& v : votes) v /= static_cast<double>(k);
    out.scores.push_back(std::move(votes));
  }
  return out;
}

namespace {

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified split over the labeling's classes; a singleton class stays in
/// the training side.
Split stratified_split(const std::vector<int>& class_of_object, std::size_t n_classes,
                       double test_fraction, Rng& rng) {
  Split split;
  for (std::size_t n = 0; n < n_classes; ++n) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < class_of_object.size(); ++i)
      if (class_of_object[i] == static_cast<int>(n)) members.push_back(i);
    if (members.empty()) continue;
    rng.shuffle(members);
    std::size_t n_test = 0;
    if (members.size() >= 2) {
      const auto wanted = static_cast<std::size_t>(
          round_half_up(static_cast<double>(members.size()) * test_fraction));
      n_test = std::clamp<std::size_t>(wanted, 1, members.size() - 1);
    }
    for (std::size_t i = 0; i < members.size(); ++i)
      (i < n_test ? split.test : split.train).push_back(members[i]);
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

FeatureMatrix take_rows(const FeatureMatrix& all, const std::vector<std::size_t>& rows) {
  FeatureMatrix out;
  out.feature_names = all.feature_names;
  for (std::size_t r : rows) {
    out.object_ids.push_back(all.object_ids[r]);
    out.rows.push_back(all.rows[r]);
  }
  return out;
}

}  // namespace

CompareReport compare_labelings(const TemporalDataset& data, const Labeling& label_a,
                                const Labeling& label_b,
                                const std::vector<NamedFeatures>& feature_sets,
                                const CompareProtocol& protocol) {
  const std::vector<const Labeling*> labelings = {&label_a, &label_b};

  CompareReport report;
  report.labeling_names = {"A", "B"};
  for (const auto& fs : feature_sets) report.feature_set_names.push_back(fs.name);
  report.mean_auc.assign(feature_sets.size(), std::vector<double>(labelings.size(), 0.0));
  report.split_aucs.assign(
      feature_sets.size(),
      std::vector<std::vector<double>>(labelings.size(), std::vector<double>(protocol.repeats, 0.0)));

  for (std::size_t li = 0; li < labelings.size(); ++li) {
    const Labeling& labeling = *labelings[li];
    // Align labels with the dataset's object order.
    const auto by_id = label_map(labeling);
    if (labeling.object_ids.size() != data.object_count())
      throw Error("ObjectSetMismatch", "labeling does not cover the dataset's objects");
    std::vector<int> class_of_object(data.object_count());
    std::vector<std::string> label_of_object(data.object_count());
    std::unordered_map<std::string, int> class_ids;
    for (std::size_t n = 0; n < labeling.classes.size(); ++n)
      class_ids[labeling.classes[n]] = static_cast<int>(n);
    for (std::size_t i = 0; i < data.object_count(); ++i) {
      auto it = by_id.find(data.object_ids()[i]);
      if (it == by_id.end())
        throw Error("ObjectSetMismatch", "object '" + data.object_ids()[i] + "' is unlabeled");
      label_of_object[i] = it->second;
      class_of_object[i] = class_ids.at(it->second);
    }

    for (std::size_t s = 0; s < protocol.repeats; ++s) {
      Rng rng(protocol.seed + s);
      const Split split =
          stratified_split(class_of_object, labeling.classes.size(), protocol.test_fraction, rng);

      Labeling test_truth;
      test_truth.classes = labeling.classes;
      for (std::size_t r : split.test) {
        test_truth.object_ids.push_back(data.object_ids()[r]);
        test_truth.labels.push_back(label_of_object[r]);
      }
      std::vector<std::string> train_labels;
      for (std::size_t r : split.train) train_labels.push_back(label_of_object[r]);

      for (std::size_t fi = 0; fi < feature_sets.size(); ++fi) {
        const FeatureMatrix train = take_rows(feature_sets[fi].features, split.train);
        const FeatureMatrix test = take_rows(feature_sets[fi].features, split.test);
        const ProbeScores scores = knn_probe(train, train_labels, test, protocol.k);
        report.split_aucs[fi][li][s] = hand_till_auc(scores, test_truth);
      }
    }
    for (std::size_t fi = 0; fi < feature_sets.size(); ++fi) {
      double sum = 0.0;
      for (double v : report.split_aucs[fi][li]) sum += v;
      report.mean_auc[fi][li] = sum / static_cast<double>(protocol.repeats);
    }
  }
  return report;
}

std::string CompareReport::to_json() const {
  nlohmann::json doc;
  doc["feature_sets"] = feature_set_names;
  doc["labelings"] = labeling_names;
  doc["mean_auc"] = mean_auc;
  doc["split_aucs"] = split_aucs;
  return doc.dump(2);
}

std::string CompareReport::to_text() const {
  std::size_t width = 12;
  for (const auto& n : feature_set_names) width = std::max(width, n.size() + 2);
  auto pad = [&](const std::string& s, std::size_t w) {
    std::string out = s;
    while (out.size() < w) out = ' ' + out;
    return out;
  };
  std::string out = pad("feature set", width);
  for (const auto& l : labeling_names) out += pad(l, 10);
  out += '\n';
  for (std::size_t fi = 0; fi < feature_set_names.size(); ++fi) {
    out += pad(feature_set_names[fi], width);
    for (std::size_t li = 0; li < labeling_names.size(); ++li) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%.3f", mean_auc[fi][li]);
      out += pad(buf, 10);
    }
    out += '\n';
  }
  return out;
}

ContributionTables load_tables_csv(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw Error("EmptyDataset", "'" + path.string() + "' has no header");
  const auto header = detail::split_csv_line(lines[0]);
  if (header.size() != 22 || header[0] != "object_id")
    throw Error("CsvFormatError", "tables header must be 'object_id,h0,...,h20'");

  ContributionTables tables;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (detail::trim(lines[li]).empty()) continue;
    const auto fields = detail::split_csv_line(lines[li]);
    if (fields.size() != 22)
      throw Error("CsvFormatError", "line " + std::to_string(li + 1) + ": expected 22 fields");
    ContributionTable table{};
    for (std::size_t h = 0; h < 21; ++h) {
      if (!detail::parse_double(fields[h + 1], table[h]))
        throw Error("NonNumericValue", "line " + std::to_string(li + 1) + ", column h" +
                                           std::to_string(h));
    }
    if (!tables.emplace(std::string(fields[0]), table).second)
      throw Error("DuplicateRow", "object '" + std::string(fields[0]) + "' has two tables");
  }
  if (tables.empty()) throw Error("EmptyDataset", "'" + path.string() + "' has no tables");
  return tables;
}

DerivedAttributes derive_attributes(const TemporalDataset& data, const ContributionTables& tables,
                                    double endowment, double mpcr, int group_size) {
  const auto g_col = data.attribute_index("contribution");
  const auto b_col = data.attribute_index("belief");
  const auto o_col = data.attribute_index("others");
  if (!g_col) throw Error("MissingColumn", "panel lacks 'contribution'");
  if (!b_col) throw Error("MissingColumn", "panel lacks 'belief'");
  if (!o_col) throw Error("MissingColumn", "panel lacks 'others'");

  const std::size_t T = data.time_count();
  DerivedAttributes out;
  out.object_ids = data.object_ids();
  out.time_points = data.time_points();
  out.payoff.assign(data.object_count(), std::vector<double>(T, 0.0));
  out.predicted_contribution = out.payoff;
  out.initial_deviation = out.payoff;
  out.prediction_accuracy = out.payoff;
  out.initial_deviation_mean.assign(data.object_count(), 0.0);
  out.prediction_accuracy_sd.assign(data.object_count(), 0.0);

  for (std::size_t i = 0; i < data.object_count(); ++i) {
    const auto& id = data.object_ids()[i];
    auto table_it = tables.find(id);
    if (table_it == tables.end())
      throw Error("MissingColumn", "no contribution table for object '" + id + "'");
    const auto& table = table_it->second;

    for (std::size_t t = 0; t < T; ++t) {
      const double g = data.value(i, t, *g_col);
      const double belief = data.value(i, t, *b_col);
      const double others = data.value(i, t, *o_col);
      out.payoff[i][t] =
          endowment - g + mpcr * (g + static_cast<double>(group_size - 1) * others);
      const double h = round_half_up(belief);
      if (h < 0.0 || h > 20.0)
        throw Error("TableIndexOutOfRange", "object '" + id + "': belief " +
                                                detail::format_double(belief) +
                                                " is outside the 0..20 table");
      out.predicted_contribution[i][t] = table[static_cast<std::size_t>(h)];
      out.initial_deviation[i][t] = g - out.predicted_contribution[i][t];
      out.prediction_accuracy[i][t] = belief - others;
    }
    double dev_sum = 0.0, acc_sum = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      dev_sum += out.initial_deviation[i][t];
      acc_sum += out.prediction_accuracy[i][t];
    }
    out.initial_deviation_mean[i] = dev_sum / static_cast<double>(T);
    const double acc_mean = acc_sum / static_cast<double>(T);
    double ss = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const double d = out.prediction_accuracy[i][t] - acc_mean;
      ss += d * d;
    }
    out.prediction_accuracy_sd[i] = std::sqrt(ss / static_cast<double>(T));
  }
  return out;
}

std::string DerivedAttributes::to_csv() const {
  std::string out = "object_id,time,payoff,initial_deviation,prediction_accuracy\n";
  for (std::size_t i = 0; i < object_ids.size(); ++i) {
    for (std::size_t t = 0; t < time_points.size(); ++t) {
      out += object_ids[i];
      out += ',';
      out += std::to_string(time_points[t]);
      out += ',';
      out += detail::format_double(payoff[i][t]);
      out += ',';
      out += detail::format_double(initial_deviation[i][t]);
      out += ',';
      out += detail::format_double(prediction_accuracy[i][t]);
      out += '\n';
    }
  }
  return out;
}

std::string DerivedAttributes::summary_to_csv() const {
  std::string out = "object_id,initial_deviation_mean,prediction_accuracy_sd\n";
  for (std::size_t i = 0; i < object_ids.size(); ++i) {
    out += object_ids[i];
    out += ',';
    out += detail::format_double(initial_deviation_mean[i]);
    out += ',';
    out += detail::format_double(prediction_accuracy_sd[i]);
    out += '\n';
  }
  return out;
}

namespace {

void append_temporal_block(FeatureMatrix& m, const TemporalDataset& data,
                           const std::string& attr) {
  const auto col = data.attribute_index(attr);
  if (!col) throw Error("MissingColumn", "panel lacks '" + attr + "'");
  for (std::size_t t = 0; t < data.time_count(); ++t)
    m.feature_names.push_back(attr + "_t" + std::to_string(data.time_points()[t]));
  for (std::size_t i = 0; i < data.object_count(); ++i)
    for (std::size_t t = 0; t < data.time_count(); ++t)
      m.rows[i].push_back(data.value(i, t, *col));
}

void append_matrix_block(FeatureMatrix& m, const std::vector<std::vector<double>>& values,
                         const std::vector<int>& time_points, const std::string& name) {
  for (int tp : time_points) m.feature_names.push_back(name + "_t" + std::to_string(tp));
  for (std::size_t i = 0; i < values.size(); ++i)
    for (double v : values[i]) m.rows[i].push_back(v);
}

void append_scalar(FeatureMatrix& m, const std::vector<double>& values, const std::string& name) {
  m.feature_names.push_back(name);
  for (std::size_t i = 0; i < values.size(); ++i) m.rows[i].push_back(values[i]);
}

void append_mean_of(FeatureMatrix& m, const TemporalDataset& data, const std::string& attr,
                    const std::string& name) {
  const auto col = data.attribute_index(attr);
  if (!col) throw Error("MissingColumn", "panel lacks '" + attr + "'");
  m.feature_names.push_back(name);
  for (std::size_t i = 0; i < data.object_count(); ++i) {
    double sum = 0.0;
    for (std::size_t t = 0; t < data.time_count(); ++t) sum += data.value(i, t, *col);
    m.rows[i].push_back(sum / static_cast<double>(data.time_count()));
  }
}

void append_tables_block(FeatureMatrix& m, const TemporalDataset& data,
                         const ContributionTables& tables) {
  for (std::size_t h = 0; h < 21; ++h) m.feature_names.push_back("h" + std::to_string(h));
  for (std::size_t i = 0; i < data.object_count(); ++i) {
    auto it = tables.find(data.object_ids()[i]);
    if (it == tables.end())
      throw Error("MissingInput", "no contribution table for '" + data.object_ids()[i] + "'");
    for (double v : it->second) m.rows[i].push_back(v);
  }
}

void append_derived_summaries(FeatureMatrix& m, const TemporalDataset& data,
                              const DerivedAttributes& derived) {
  append_scalar(m, derived.initial_deviation_mean, "initial_deviation_mean");
  append_scalar(m, derived.prediction_accuracy_sd, "prediction_accuracy_sd");
  append_mean_of(m, data, "contribution", "contribution_mean");
  append_mean_of(m, data, "belief", "belief_mean");
}

void append_derived(FeatureMatrix& m, const TemporalDataset& data,
                    const DerivedAttributes* derived) {
  if (!derived)
    throw Error("MissingInput", "feature set needs derived attributes (contribution tables)");
  append_matrix_block(m, derived->payoff, derived->time_points, "payoff");
  append_matrix_block(m, derived->initial_deviation, derived->time_points, "initial_deviation");
  append_matrix_block(m, derived->prediction_accuracy, derived->time_points,
                      "prediction_accuracy");
  append_derived_summaries(m, data, *derived);
}

void append_original(FeatureMatrix& m, const TemporalDataset& data,
                     const ContributionTables* tables) {
  if (!tables)
    throw Error("MissingInput", "feature set 'original' needs contribution tables");
  append_temporal_block(m, data, "contribution");
  append_temporal_block(m, data, "belief");
  append_temporal_block(m, data, "others");
  append_tables_block(m, data, *tables);
}

}  // namespace

FeatureMatrix build_feature_set(std::string_view name, const TemporalDataset& data,
                                const DerivedAttributes* derived,
                                const ContributionTables* tables) {
  FeatureMatrix m;
  m.object_ids = data.object_ids();
  m.rows.assign(data.object_count(), {});

  if (name == "belief_contrib") {
    append_temporal_block(m, data, "contribution");
    append_temporal_block(m, data, "belief");
  } else if (name == "original") {
    append_original(m, data, tables);
  } else if (name == "derived") {
    append_derived(m, data, derived);
  } else if (name == "derived_summary") {
    if (!derived)
      throw Error("MissingInput", "feature set needs derived attributes (contribution tables)");
    append_derived_summaries(m, data, *derived);
  } else if (name == "original_derived") {
    append_original(m, data, tables);
    append_derived(m, data, derived);
  } else {
    throw Error("UnknownFeatureSet", "no feature set named '" + std::string(name) + "'");
  }
  return m;
}

}  // namespace trc
