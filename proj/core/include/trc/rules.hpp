#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "trc/panel.hpp"

namespace trc {

/// Threshold parameter with a closed discretized range. The grid is
/// {lower, lower+step, ...} truncated at the largest point <= upper, so both
/// endpoints belong to the grid whenever the step divides the range.
struct ParamRange {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  double step = 1.0;

  std::size_t grid_size() const;
  double grid_value(std::size_t k) const { return lower + static_cast<double>(k) * step; }
};

enum class CompareOp { Less, LessEq, Greater, GreaterEq, Equal };

CompareOp compare_op_from_name(std::string_view name);
std::string_view compare_op_name(CompareOp op);

/// Atomic comparison of one aggregate column against one bound parameter.
/// Equality uses absolute tolerance 1e-9; inequalities are exact.
struct Condition {
  std::string attribute;
  CompareOp op = CompareOp::Less;
  std::string param;
};

struct Rule {
  std::string class_name;
  bool require_all = true;  // ALL vs ANY over conditions
  std::vector<Condition> conditions;
};

/// Expert rule template: ordered first-match rules over aggregate columns,
/// thresholds given as parameter ranges. Rule order is semantic.
struct RuleTemplate {
  std::vector<std::string> classes;
  std::string default_class;
  std::vector<std::string> compactness_attributes;
  std::vector<AggregateSpec> aggregates;
  std::vector<ParamRange> params;
  std::vector<Rule> rules;

  std::size_t class_index(std::string_view name) const;  // throws UnknownClass
  std::size_t param_index(std::string_view name) const;  // throws UnknownParam
};

/// A template with every parameter bound to one grid value.
struct CandidateClassifier {
  const RuleTemplate* rule_template = nullptr;  // non-owning; must outlive the candidate
  std::vector<double> values;                   // aligned with rule_template->params

  double binding(std::string_view param) const;
};

/// Total assignment of one class per object.
struct Labeling {
  std::vector<std::string> object_ids;
  std::vector<std::string> labels;   // aligned with object_ids
  std::vector<std::string> classes;  // ordered class universe

  std::string_view label_of(std::string_view object_id) const;  // throws IncompleteLabeling
  std::string to_csv() const;                                   // header: object_id,class
};

/// Loads `object_id,class` CSV; class universe is first-appearance ordered.
Labeling load_labels_csv(const std::filesystem::path& path);

/// Parses and validates a JSON rule-spec document (see docs/formats.md).
/// Throws Error kinds: SyntaxError, UnknownParam, UnknownClass, EmptyRule,
/// DuplicateParam, InvalidTemplate.
RuleTemplate parse_rule_spec(const std::string& text);
RuleTemplate load_rule_spec(const std::filesystem::path& path);

inline constexpr std::uint64_t kDefaultGridCap = 100'000'000;

/// The Cartesian product of all parameter grids in lexicographic order of
/// (parameter declaration order, ascending grid value). Candidates are
/// decoded on demand so large grids cost no memory.
class CandidateGrid {
 public:
  CandidateGrid(const RuleTemplate& tmpl, std::uint64_t cap = kDefaultGridCap);

  std::uint64_t size() const { return total_; }
  const std::vector<std::uint64_t>& grid_sizes() const { return sizes_; }

  /// Binding values of the index-th candidate; the last parameter varies
  /// fastest.
  std::vector<double> bindings_at(std::uint64_t index) const;
  CandidateClassifier candidate(std::uint64_t index) const;

 private:
  const RuleTemplate* tmpl_;
  std::vector<std::uint64_t> sizes_;
  std::uint64_t total_ = 1;
};

/// Throws Error("GridOverflow", ...) when the product of grid sizes exceeds
/// the cap.
CandidateGrid enumerate_candidates(const RuleTemplate& tmpl,
                                   std::uint64_t cap = kDefaultGridCap);

/// Condition references resolved once against a concrete view, for repeated
/// application with different bindings.
class CompiledRules {
 public:
  CompiledRules(const RuleTemplate& tmpl, const AggregatedView& view);  // throws UnknownAttribute

  std::size_t object_count() const { return n_objects_; }
  std::size_t class_count() const { return n_classes_; }

  /// First-match classification; writes one class index per object.
  void apply(const std::vector<double>& param_values, std::vector<int>& class_out) const;

 private:
  struct CompiledCondition {
    const double* column;
    CompareOp op;
    std::size_t param;
  };
  struct CompiledRule {
    int class_index;
    bool require_all;
    std::vector<CompiledCondition> conditions;
  };

  std::vector<CompiledRule> rules_;
  int default_class_ = 0;
  std::size_t n_objects_ = 0;
  std::size_t n_classes_ = 0;
};

/// Applies a candidate to a view: rules are tested in order, the first
/// satisfied rule assigns its class, otherwise the default class.
Labeling classify(const AggregatedView& view, const CandidateClassifier& candidate);

}  // namespace trc
