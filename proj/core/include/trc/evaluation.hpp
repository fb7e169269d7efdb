#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "trc/panel.hpp"
#include "trc/rules.hpp"

namespace trc {

/// Row-normalized cross-tabulation of two labelings: cell = 100 * |A-class
/// intersect B-class| / |A-class|. Empty A-classes give an all-zero, flagged
/// row. Cells are stored raw; exports round to one decimal place.
struct AgreementMatrix {
  std::vector<std::string> row_classes;  // labeling A
  std::vector<std::string> col_classes;  // labeling B
  std::vector<std::vector<double>> cells;
  std::vector<bool> empty_row;

  std::string to_json() const;
  std::string to_text() const;
};

/// Throws Error("ObjectSetMismatch") unless both labelings cover the same
/// object set.
AgreementMatrix agreement_matrix(const Labeling& a, const Labeling& b);

/// Fraction of objects with identical labels in both labelings.
double label_agreement(const Labeling& a, const Labeling& b);

/// Rank-based (Mann-Whitney) AUC with tied scores contributing 0.5 per pair.
/// Throws Error("DegenerateClass") when either side is empty.
double pairwise_auc(const std::vector<double>& scores, const std::vector<bool>& positive);

/// Per-object class-membership scores, each row summing to 1.
struct ProbeScores {
  std::vector<std::string> object_ids;
  std::vector<std::string> classes;
  std::vector<std::vector<double>> scores;  // scores[object][class]
};

/// Multiclass AUC: mean over unordered class pairs {i, j} of the symmetric
/// pair value (A(i|j) + A(j|i)) / 2, scaled by 2 / (c (c-1)) where c counts
/// classes present in the truth. A truth class missing from the score
/// columns scores 0 for every object.
double hand_till_auc(const ProbeScores& scores, const Labeling& truth);

struct FeatureMatrix {
  std::vector<std::string> object_ids;
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> rows;  // rows[object][feature]
};

/// Nearest-neighbour vote: score for class c is (count of c among the k
/// nearest train rows) / k, distances Euclidean over features min-max
/// normalized with train statistics. Ties at the k-th distance break by
/// train object id. Throws Error kinds: EmptyTrain, BadK.
ProbeScores knn_probe(const FeatureMatrix& train, const std::vector<std::string>& train_labels,
                      const FeatureMatrix& test, std::size_t k);

struct CompareProtocol {
  double test_fraction = 0.25;
  std::size_t repeats = 10;
  std::size_t k = 5;
  std::uint64_t seed = 0;
};

struct NamedFeatures {
  std::string name;
  FeatureMatrix features;  // rows aligned with the dataset's object order
};

/// Mean probe AUC per (feature set, labeling): rows = feature sets,
/// columns = labelings.
struct CompareReport {
  std::vector<std::string> feature_set_names;
  std::vector<std::string> labeling_names;
  std::vector<std::vector<double>> mean_auc;                 // [feature set][labeling]
  std::vector<std::vector<std::vector<double>>> split_aucs;  // [feature set][labeling][split]

  std::string to_json() const;
  std::string to_text() const;
};

/// For every feature set and labeling, runs `repeats` stratified 75/25
/// splits (seeded; split s uses seed + s), scores the held-out objects with
/// the KNN probe and reports the mean multiclass AUC. Bit-reproducible for a
/// fixed seed.
CompareReport compare_labelings(const TemporalDataset& data, const Labeling& label_a,
                                const Labeling& label_b,
                                const std::vector<NamedFeatures>& feature_sets,
                                const CompareProtocol& protocol);

using ContributionTable = std::array<double, 21>;
using ContributionTables = std::unordered_map<std::string, ContributionTable>;

/// Loads `object_id,h0,...,h20` CSV.
ContributionTables load_tables_csv(const std::filesystem::path& path);

/// Per-round and per-object attributes reconstructed from a panel with
/// contribution/belief/others columns:
///   payoff            endowment - g + mpcr * (g + (group_size - 1) * others)
///   predicted         contribution_table[round(belief)]
///   initial_deviation g - predicted
///   prediction_accuracy belief - others
/// plus the per-object mean of initial deviation and population SD of
/// prediction accuracy.
struct DerivedAttributes {
  std::vector<std::string> object_ids;
  std::vector<int> time_points;
  std::vector<std::vector<double>> payoff;                  // [object][time]
  std::vector<std::vector<double>> predicted_contribution;  // [object][time]
  std::vector<std::vector<double>> initial_deviation;       // [object][time]
  std::vector<std::vector<double>> prediction_accuracy;     // [object][time]
  std::vector<double> initial_deviation_mean;               // [object]
  std::vector<double> prediction_accuracy_sd;               // [object]

  std::string to_csv() const;          // object_id,time,payoff,initial_deviation,prediction_accuracy
  std::string summary_to_csv() const;  // object_id,initial_deviation_mean,prediction_accuracy_sd
};

/// Throws Error kinds: MissingColumn, TableIndexOutOfRange.
DerivedAttributes derive_attributes(const TemporalDataset& data, const ContributionTables& tables,
                                    double endowment, double mpcr, int group_size);

/// Named feature selections over a game panel. Recognized names:
/// belief_contrib, original, derived, derived_summary, original_derived.
/// `original` and the derived sets need contribution tables / derived
/// attributes and throw Error("MissingInput") without them.
FeatureMatrix build_feature_set(std::string_view name, const TemporalDataset& data,
                                const DerivedAttributes* derived, const ContributionTables* tables);

}  // namespace trc
