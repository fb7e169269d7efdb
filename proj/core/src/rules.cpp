#include "trc/rules.hpp"

#include <cmath>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "io_util.hpp"
#include "trc/error.hpp"

namespace trc {

std::size_t ParamRange::grid_size() const {
  // Tolerance absorbs decimal parsing artifacts like (1.0 - 0.0) / 0.1 = 9.999...
  return static_cast<std::size_t>(std::floor((upper - lower) / step + 1e-9)) + 1;
}

CompareOp compare_op_from_name(std::string_view name) {
  if (name == "<") return CompareOp::Less;
  if (name == "<=") return CompareOp::LessEq;
  if (name == ">") return CompareOp::Greater;
  if (name == ">=") return CompareOp::GreaterEq;
  if (name == "=" || name == "==") return CompareOp::Equal;
  throw Error("InvalidTemplate", "unknown comparison operator '" + std::string(name) + "'");
}

std::string_view compare_op_name(CompareOp op) {
  switch (op) {
    case CompareOp::Less: return "<";
    case CompareOp::LessEq: return "<=";
    case CompareOp::Greater: return ">";
    case CompareOp::GreaterEq: return ">=";
    case CompareOp::Equal: return "=";
  }
  return "?";
}

std::size_t RuleTemplate::class_index(std::string_view name) const {
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i] == name) return i;
  throw Error("UnknownClass", "class '" + std::string(name) + "' is not declared");
}

std::size_t RuleTemplate::param_index(std::string_view name) const {
  for (std::size_t i = 0; i < params.size(); ++i)
    if (params[i].name == name) return i;
  throw Error("UnknownParam", "parameter '" + std::string(name) + "' is not declared");
}

double CandidateClassifier::binding(std::string_view param) const {
  return values[rule_template->param_index(param)];
}

std::string_view Labeling::label_of(std::string_view object_id) const {
  for (std::size_t i = 0; i < object_ids.size(); ++i)
    if (object_ids[i] == object_id) return labels[i];
  throw Error("IncompleteLabeling", "object '" + std::string(object_id) + "' has no label");
}

std::string Labeling::to_csv() const {
  std::string out = "object_id,class\n";
  for (std::size_t i = 0; i < object_ids.size(); ++i) {
    out += object_ids[i];
    out += ',';
    out += labels[i];
    out += '\n';
  }
  return out;
}

Labeling load_labels_csv(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw Error("EmptyDataset", "'" + path.string() + "' has no header");
  const auto header = detail::split_csv_line(lines[0]);
  if (header.size() != 2 || header[0] != "object_id" || header[1] != "class")
    throw Error("CsvFormatError", "labels header must be 'object_id,class'");

  Labeling out;
  std::set<std::string> seen_ids;
  std::set<std::string> seen_classes;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (detail::trim(lines[li]).empty()) continue;
    const auto fields = detail::split_csv_line(lines[li]);
    if (fields.size() != 2)
      throw Error("CsvFormatError", "line " + std::to_string(li + 1) + ": expected 2 fields");
    std::string id(fields[0]);
    std::string cls(fields[1]);
    if (!seen_ids.insert(id).second)
      throw Error("DuplicateRow", "object '" + id + "' labeled twice");
    if (seen_classes.insert(cls).second) out.classes.push_back(cls);
    out.object_ids.push_back(std::move(id));
    out.labels.push_back(std::move(cls));
  }
  if (out.object_ids.empty()) throw Error("EmptyDataset", "'" + path.string() + "' has no labels");
  return out;
}

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const char* context) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw Error("SyntaxError", std::string("missing key '") + key + "' in " + context);
  return *it;
}

}  // namespace

RuleTemplate parse_rule_spec(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error("SyntaxError", e.what());
  }
  if (!doc.is_object()) throw Error("SyntaxError", "rule spec must be a JSON object");

  RuleTemplate tmpl;
  try {
    for (const auto& c : require(doc, "classes", "rule spec")) tmpl.classes.push_back(c.get<std::string>());
    tmpl.default_class = require(doc, "default_class", "rule spec").get<std::string>();
    for (const auto& a : require(doc, "compactness_attributes", "rule spec"))
      tmpl.compactness_attributes.push_back(a.get<std::string>());

    for (const auto& a : require(doc, "aggregates", "rule spec")) {
      AggregateSpec spec;
      spec.name = require(a, "name", "aggregate").get<std::string>();
      spec.source = require(a, "source", "aggregate").get<std::string>();
      spec.kind = AggregateSpec::kind_from_name(require(a, "kind", "aggregate").get<std::string>());
      if (AggregateSpec::kind_needs_value(spec.kind))
        spec.value = require(a, "value", "aggregate").get<double>();
      tmpl.aggregates.push_back(std::move(spec));
    }

    for (const auto& p : require(doc, "params", "rule spec")) {
      ParamRange range;
      range.name = require(p, "name", "param").get<std::string>();
      range.lower = require(p, "lower", "param").get<double>();
      range.upper = require(p, "upper", "param").get<double>();
      range.step = require(p, "step", "param").get<double>();
      tmpl.params.push_back(std::move(range));
    }

    for (const auto& r : require(doc, "rules", "rule spec")) {
      Rule rule;
      rule.class_name = require(r, "class", "rule").get<std::string>();
      const std::string combine = require(r, "combine", "rule").get<std::string>();
      if (combine == "all")
        rule.require_all = true;
      else if (combine == "any")
        rule.require_all = false;
      else
        throw Error("SyntaxError", "rule combine must be 'all' or 'any', got '" + combine + "'");
      for (const auto& c : require(r, "conditions", "rule")) {
        Condition cond;
        cond.attribute = require(c, "attr", "condition").get<std::string>();
        cond.op = compare_op_from_name(require(c, "op", "condition").get<std::string>());
        cond.param = require(c, "param", "condition").get<std::string>();
        rule.conditions.push_back(std::move(cond));
      }
      tmpl.rules.push_back(std::move(rule));
    }
  } catch (const json::exception& e) {
    throw Error("SyntaxError", e.what());
  }

  // Validation.
  if (tmpl.classes.empty()) throw Error("InvalidTemplate", "no classes declared");
  if (tmpl.compactness_attributes.empty())
    throw Error("InvalidTemplate", "compactness_attributes must be non-empty");
  {
    std::set<std::string> unique(tmpl.classes.begin(), tmpl.classes.end());
    if (unique.size() != tmpl.classes.size())
      throw Error("InvalidTemplate", "duplicate class name");
    if (!unique.count(tmpl.default_class))
      throw Error("UnknownClass", "default_class '" + tmpl.default_class + "' is not declared");
  }
  {
    std::set<std::string> names;
    for (const auto& p : tmpl.params) {
      if (!names.insert(p.name).second)
        throw Error("DuplicateParam", "parameter '" + p.name + "' declared twice");
      if (!(p.step > 0.0))
        throw Error("InvalidTemplate", "parameter '" + p.name + "' needs step > 0");
      if (p.lower > p.upper)
        throw Error("InvalidTemplate", "parameter '" + p.name + "' has lower > upper");
      if ((p.upper - p.lower) / p.step > 1e15)
        throw Error("InvalidTemplate", "parameter '" + p.name + "' has an absurdly fine grid");
    }
  }
  {
    std::set<std::string> agg_names;
    for (const auto& a : tmpl.aggregates)
      if (!agg_names.insert(a.name).second)
        throw Error("InvalidTemplate", "duplicate aggregate name '" + a.name + "'");
  }
  std::set<std::string> declared_classes(tmpl.classes.begin(), tmpl.classes.end());
  std::set<std::string> declared_params;
  for (const auto& p : tmpl.params) declared_params.insert(p.name);
  for (const auto& rule : tmpl.rules) {
    if (!declared_classes.count(rule.class_name))
      throw Error("UnknownClass", "rule assigns undeclared class '" + rule.class_name + "'");
    if (rule.conditions.empty())
      throw Error("EmptyRule", "rule for class '" + rule.class_name + "' has no conditions");
    for (const auto& cond : rule.conditions)
      if (!declared_params.count(cond.param))
        throw Error("UnknownParam", "condition references undeclared parameter '" + cond.param + "'");
  }
  return tmpl;
}

RuleTemplate load_rule_spec(const std::filesystem::path& path) {
  return parse_rule_spec(detail::read_file(path));
}

CandidateGrid::CandidateGrid(const RuleTemplate& tmpl, std::uint64_t cap) : tmpl_(&tmpl) {
  sizes_.reserve(tmpl.params.size());
  long double estimate = 1.0L;
  for (const auto& p : tmpl.params) {
    if ((p.upper - p.lower) / p.step > 1e15)
      throw Error("GridOverflow", "parameter '" + p.name + "' alone exceeds any sane grid");
    const std::uint64_t n = p.grid_size();
    sizes_.push_back(n);
    estimate *= static_cast<long double>(n);
    if (estimate > static_cast<long double>(cap))
      throw Error("GridOverflow", "grid has more than " + std::to_string(cap) +
                                      " candidates; coarsen steps or use the heuristic optimizer");
    total_ *= n;
  }
}

std::vector<double> CandidateGrid::bindings_at(std::uint64_t index) const {
  std::vector<double> values(sizes_.size());
  for (std::size_t p = sizes_.size(); p-- > 0;) {
    const std::uint64_t k = index % sizes_[p];
    index /= sizes_[p];
    values[p] = tmpl_->params[p].grid_value(static_cast<std::size_t>(k));
  }
  return values;
}

CandidateClassifier CandidateGrid::candidate(std::uint64_t index) const {
  return CandidateClassifier{tmpl_, bindings_at(index)};
}

CandidateGrid enumerate_candidates(const RuleTemplate& tmpl, std::uint64_t cap) {
  return CandidateGrid(tmpl, cap);
}

CompiledRules::CompiledRules(const RuleTemplate& tmpl, const AggregatedView& view) {
  n_objects_ = view.object_ids.size();
  n_classes_ = tmpl.classes.size();
  default_class_ = static_cast<int>(tmpl.class_index(tmpl.default_class));
  for (const auto& rule : tmpl.rules) {
    CompiledRule compiled;
    compiled.class_index = static_cast<int>(tmpl.class_index(rule.class_name));
    compiled.require_all = rule.require_all;
    for (const auto& cond : rule.conditions) {
      const auto col = view.column_index(cond.attribute);
      if (!col)
        throw Error("UnknownAttribute",
                    "condition references attribute '" + cond.attribute + "' missing from view");
      compiled.conditions.push_back(
          {view.columns[*col].data(), cond.op, tmpl.param_index(cond.param)});
    }
    rules_.push_back(std::move(compiled));
  }
}

namespace {

inline bool holds(double value, CompareOp op, double threshold) {
  switch (op) {
    case CompareOp::Less: return value < threshold;
    case CompareOp::LessEq: return value <= threshold;
    case CompareOp::Greater: return value > threshold;
    case CompareOp::GreaterEq: return value >= threshold;
    case CompareOp::Equal: return std::fabs(value - threshold) <= 1e-9;
  }
  return false;
}

}  // namespace

void CompiledRules::apply(const std::vector<double>& param_values,
                          std::vector<int>& class_out) const {
  class_out.resize(n_objects_);
  for (std::size_t i = 0; i < n_objects_; ++i) {
    int assigned = default_class_;
    for (const auto& rule : rules_) {
      bool fired = rule.require_all;
      for (const auto& cond : rule.conditions) {
        const bool ok = holds(cond.column[i], cond.op, param_values[cond.param]);
        if (rule.require_all) {
          if (!ok) {
            fired = false;
            break;
          }
        } else if (ok) {
          fired = true;
          break;
        }
      }
      if (fired) {
        assigned = rule.class_index;
        break;
      }
    }
    class_out[i] = assigned;
  }
}

Labeling classify(const AggregatedView& view, const CandidateClassifier& candidate) {
  const RuleTemplate& tmpl = *candidate.rule_template;
  CompiledRules compiled(tmpl, view);
  std::vector<int> indices;
  compiled.apply(candidate.values, indices);
  Labeling out;
  out.object_ids = view.object_ids;
  out.classes = tmpl.classes;
  out.labels.reserve(indices.size());
  for (int idx : indices) out.labels.push_back(tmpl.classes[static_cast<std::size_t>(idx)]);
  return out;
}

}  // namespace trc
