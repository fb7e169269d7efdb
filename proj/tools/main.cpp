// trc: simulate -> optimize -> classify -> evaluate -> report pipeline for
// threshold-rule classification of panel data.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "manifest.hpp"
#include "trc/compactness.hpp"
#include "trc/error.hpp"
#include "trc/evaluation.hpp"
#include "trc/optimizer.hpp"
#include "trc/panel.hpp"
#include "trc/pgg.hpp"
#include "trc/rules.hpp"
#include "trc/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitResource = 3;

int exit_code_for(const trc::Error& e) {
  return e.kind() == "GridOverflow" ? kExitResource : kExitInput;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw trc::Error("IoError", "cannot write '" + path.string() + "'");
  f << content;
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw trc::Error("IoError", "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

fs::path manifest_path_for(const fs::path& out, bool out_is_dir) {
  if (out_is_dir) return out / "manifest.json";
  fs::path p = out;
  p += ".manifest.json";
  return p;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool unrounded = false;
};

int cmd_simulate(const SimulateArgs& args) {
  Timer timer;
  trc::SimConfig config = trc::load_sim_config(args.config);
  if (args.seed) config.params.seed = *args.seed;

  const trc::SimOutput sim = trc::simulate(config.params, config.roster);

  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  trc::write_sim_panel_csv(sim, dir / "panel.csv", args.unrounded);
  trc::write_truth_csv(sim, dir / "truth.csv");
  trc::write_tables_csv(sim, dir / "tables.csv");

  trc::cli::RunManifest manifest;
  manifest.subcommand = "simulate";
  manifest.seed = config.params.seed;
  manifest.inputs = {{"config", args.config}};
  manifest.outputs = {{"panel", dir / "panel.csv"},
                      {"truth", dir / "truth.csv"},
                      {"tables", dir / "tables.csv"}};
  manifest.duration_seconds = timer.seconds();
  manifest.write(manifest_path_for(dir, true));

  std::cout << "simulated " << sim.panel.object_count() << " players x "
            << sim.panel.time_count() << " rounds -> " << dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- optimize

struct OptimizeArgs {
  std::string data;
  std::string rules;
  std::string measure = "stddev";
  std::string mode = "brute";
  std::string out;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::uint64_t grid_cap = trc::kDefaultGridCap;
  bool full_cost = false;
  std::size_t de_pop = 20;
  std::size_t de_gens = 50;
  double de_f = 0.8;
  double de_cr = 0.9;
};

std::string summary_table(const trc::BestResult& best) {
  const auto& params = best.candidate.rule_template->params;
  std::size_t name_width = 9;
  for (const auto& p : params) name_width = std::max(name_width, p.name.size());
  char buf[160];
  std::string out;
  std::snprintf(buf, sizeof(buf), "%-*s %10s %10s %10s\n", static_cast<int>(name_width),
                "parameter", "lower", "upper", "best");
  out += buf;
  for (std::size_t p = 0; p < params.size(); ++p) {
    std::snprintf(buf, sizeof(buf), "%-*s %10g %10g %10g\n", static_cast<int>(name_width),
                  params[p].name.c_str(), params[p].lower, params[p].upper,
                  best.candidate.values[p]);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "cost_total %.9g  ties %llu  evaluated %llu\n", best.cost.total,
                static_cast<unsigned long long>(best.ties),
                static_cast<unsigned long long>(best.evaluated));
  out += buf;
  return out;
}

int cmd_optimize(const OptimizeArgs& args) {
  Timer timer;
  const trc::TemporalDataset data = trc::load_temporal_csv(args.data);
  const trc::RuleTemplate tmpl = trc::load_rule_spec(args.rules);
  const trc::Measure measure = trc::measure_from_name(args.measure);

  trc::BestResult best = [&] {
    if (args.mode == "brute") {
      trc::BruteForceOptions options;
      options.workers = args.workers;
      options.grid_cap = args.grid_cap;
      return trc::brute_force(tmpl, data, measure, options);
    }
    if (args.mode == "de") {
      trc::DeParams de;
      de.population_size = args.de_pop;
      de.generations = args.de_gens;
      de.differential_weight = args.de_f;
      de.crossover_rate = args.de_cr;
      de.seed = args.seed;
      return trc::differential_evolution(tmpl, data, measure, de);
    }
    throw trc::Error("InvalidParams", "mode must be 'brute' or 'de'");
  }();

  write_text(args.out, best.to_json(args.full_cost) + "\n");

  trc::cli::RunManifest manifest;
  manifest.subcommand = "optimize";
  manifest.seed = args.seed;
  manifest.inputs = {{"data", args.data}, {"rules", args.rules}};
  manifest.outputs = {{"best", args.out}};
  manifest.duration_seconds = timer.seconds();
  manifest.write(manifest_path_for(args.out, false));

  std::cout << summary_table(best);
  return kExitOk;
}

// ---------------------------------------------------------------- classify

struct ClassifyArgs {
  std::string data;
  std::string rules;
  std::string bindings;
  std::string out;
  std::string view_out;
};

int cmd_classify(const ClassifyArgs& args) {
  Timer timer;
  const trc::TemporalDataset data = trc::load_temporal_csv(args.data);
  const trc::RuleTemplate tmpl = trc::load_rule_spec(args.rules);

  json doc;
  try {
    doc = json::parse(read_text(args.bindings));
  } catch (const json::parse_error& e) {
    throw trc::Error("SyntaxError", e.what());
  }
  const json& bindings = doc.contains("bindings") ? doc["bindings"] : doc;

  trc::CandidateClassifier candidate{&tmpl, std::vector<double>(tmpl.params.size(), 0.0)};
  for (std::size_t p = 0; p < tmpl.params.size(); ++p) {
    const auto& range = tmpl.params[p];
    if (!bindings.contains(range.name))
      throw trc::Error("UnknownParam", "bindings lack parameter '" + range.name + "'");
    const double v = bindings[range.name].get<double>();
    const double k = std::round((v - range.lower) / range.step);
    if (std::fabs(range.lower + k * range.step - v) > 1e-9 || v < range.lower - 1e-9 ||
        v > range.upper + 1e-9)
      throw trc::Error("InvalidParams",
                       "binding " + std::to_string(v) + " is off the grid of '" + range.name + "'");
    candidate.values[p] = v;
  }

  const trc::AggregatedView view = trc::aggregate(data, tmpl.aggregates);
  const trc::Labeling labels = trc::classify(view, candidate);
  write_text(args.out, labels.to_csv());

  trc::cli::RunManifest manifest;
  manifest.subcommand = "classify";
  manifest.inputs = {{"data", args.data}, {"rules", args.rules}, {"bindings", args.bindings}};
  manifest.outputs = {{"labels", args.out}};
  if (!args.view_out.empty()) {
    write_text(args.view_out, view.to_csv());
    manifest.outputs.emplace_back("view", args.view_out);
  }
  manifest.duration_seconds = timer.seconds();
  manifest.write(manifest_path_for(args.out, false));

  std::cout << "labeled " << labels.object_ids.size() << " objects -> " << args.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string data;
  std::string labels_a;
  std::string labels_b;
  std::string features = "belief_contrib,original,derived,original_derived";
  std::string tables;
  std::string out;
  std::string derived_out;
  std::size_t repeats = 10;
  double test_fraction = 0.25;
  std::size_t k = 5;
  std::uint64_t seed = 0;
  double endowment = 20.0;
  double mpcr = 0.4;
  int group_size = 4;
};

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> names;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = csv.find(',', start);
    const std::string name =
        csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!name.empty()) names.push_back(name);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return names;
}

int cmd_evaluate(const EvaluateArgs& args) {
  Timer timer;
  const trc::TemporalDataset data = trc::load_temporal_csv(args.data);
  const trc::Labeling label_a = trc::load_labels_csv(args.labels_a);
  const trc::Labeling label_b = trc::load_labels_csv(args.labels_b);

  // Validate the label sets against each other before the heavier feature
  // assembly, so object-set mistakes surface first.
  const trc::AgreementMatrix agreement = trc::agreement_matrix(label_a, label_b);

  std::optional<trc::ContributionTables> tables;
  if (!args.tables.empty()) tables = trc::load_tables_csv(args.tables);
  std::optional<trc::DerivedAttributes> derived;
  if (tables)
    derived = trc::derive_attributes(data, *tables, args.endowment, args.mpcr, args.group_size);

  std::vector<trc::NamedFeatures> feature_sets;
  for (const auto& name : split_names(args.features)) {
    feature_sets.push_back(
        {name, trc::build_feature_set(name, data, derived ? &*derived : nullptr,
                                      tables ? &*tables : nullptr)});
  }
  if (feature_sets.empty()) throw trc::Error("InvalidParams", "no feature sets selected");
  trc::CompareProtocol protocol;
  protocol.repeats = args.repeats;
  protocol.test_fraction = args.test_fraction;
  protocol.k = args.k;
  protocol.seed = args.seed;
  const trc::CompareReport report =
      trc::compare_labelings(data, label_a, label_b, feature_sets, protocol);

  json doc;
  doc["agreement"] = json::parse(agreement.to_json());
  doc["auc"] = json::parse(report.to_json());
  doc["label_agreement"] = trc::label_agreement(label_a, label_b);
  write_text(args.out, doc.dump(2) + "\n");

  std::string text = "Agreement (% of row class):\n" + agreement.to_text() +
                     "\nProbe AUC (mean over " + std::to_string(args.repeats) + " splits):\n" +
                     report.to_text();
  fs::path text_path(args.out);
  text_path.replace_extension(".txt");
  write_text(text_path, text);

  trc::cli::RunManifest manifest;
  manifest.subcommand = "evaluate";
  manifest.seed = args.seed;
  manifest.inputs = {{"data", args.data}, {"labels_a", args.labels_a}, {"labels_b", args.labels_b}};
  if (!args.tables.empty()) manifest.inputs.emplace_back("tables", args.tables);
  manifest.outputs = {{"report", args.out}, {"report_text", text_path}};
  if (derived && !args.derived_out.empty()) {
    const fs::path derived_path = args.derived_out + ".csv";
    const fs::path summary_path = args.derived_out + "_summary.csv";
    write_text(derived_path, derived->to_csv());
    write_text(summary_path, derived->summary_to_csv());
    manifest.outputs.emplace_back("derived", derived_path);
    manifest.outputs.emplace_back("derived_summary", summary_path);
  }
  manifest.duration_seconds = timer.seconds();
  manifest.write(manifest_path_for(args.out, false));

  std::cout << text;
  return kExitOk;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  std::string in_dir;
  std::string out;
  std::string attr = "contribution";
};

double quantile_type7(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - std::floor(h);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

int cmd_report(const ReportArgs& args) {
  Timer timer;
  const fs::path dir(args.in_dir);
  const trc::TemporalDataset data = trc::load_temporal_csv(dir / "panel.csv");
  const auto attr = data.attribute_index(args.attr);
  if (!attr)
    throw trc::Error("MissingColumn",
                     "panel lacks '" + args.attr + "'; pass --attr to pick another column");

  std::vector<std::pair<std::string, trc::Labeling>> labelings;
  for (const char* name : {"truth", "labels"}) {
    const fs::path p = dir / (std::string(name) + ".csv");
    if (fs::exists(p)) labelings.emplace_back(name, trc::load_labels_csv(p));
  }
  if (labelings.empty())
    throw trc::Error("MissingInput", "no truth.csv or labels.csv in '" + dir.string() + "'");

  trc::cli::RunManifest manifest;
  manifest.subcommand = "report";
  manifest.inputs = {{"panel", dir / "panel.csv"}};
  manifest.outputs = {{"report", args.out}};

  std::string text;
  const fs::path out_path(args.out);
  for (const auto& [name, labeling] : labelings) {
    manifest.inputs.emplace_back(name, dir / (name + ".csv"));
    text += "Per-class mean of '" + args.attr + "' by round (" + name + "):\n";

    std::size_t width = 10;
    for (const auto& cls : labeling.classes) width = std::max(width, cls.size() + 2);
    auto pad = [&](const std::string& s, std::size_t w) {
      std::string padded = s;
      while (padded.size() < w) padded = ' ' + padded;
      return padded;
    };
    text += pad("class", width);
    for (int tp : data.time_points()) text += pad("t" + std::to_string(tp), 8);
    text += '\n';

    std::string csv = "class,time,mean,q1,median,q3,min,max\n";
    for (const auto& cls : labeling.classes) {
      text += pad(cls, width);
      for (std::size_t t = 0; t < data.time_count(); ++t) {
        std::vector<double> values;
        for (std::size_t i = 0; i < data.object_count(); ++i) {
          const auto label = labeling.label_of(data.object_ids()[i]);
          if (label == cls) values.push_back(data.value(i, t, *attr));
        }
        if (values.empty()) {
          text += pad("-", 8);
          continue;
        }
        std::sort(values.begin(), values.end());
        double sum = 0.0;
        for (double v : values) sum += v;
        const double mean = sum / static_cast<double>(values.size());
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%.2f", mean);
        text += pad(buf, 8);
        std::snprintf(buf, sizeof(buf), "%s,%d,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g\n", cls.c_str(),
                      data.time_points()[t], mean, quantile_type7(values, 0.25),
                      quantile_type7(values, 0.5), quantile_type7(values, 0.75), values.front(),
                      values.back());
        csv += buf;
      }
      text += '\n';
    }
    text += '\n';

    fs::path csv_path = out_path.parent_path() / (out_path.stem().string() + "_" + name + "_plot.csv");
    write_text(csv_path, csv);
    manifest.outputs.emplace_back(name + "_plot", csv_path);
  }

  write_text(out_path, text);
  manifest.duration_seconds = timer.seconds();
  manifest.write(manifest_path_for(out_path, false));

  std::cout << text;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Threshold-rule classification of temporal panels: simulate, optimize, classify, evaluate, report"};
  app.set_version_flag("--version", trc::kVersion);
  app.require_subcommand(1);

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic public-goods-game panel");
  sim->add_option("--config", sim_args.config, "Sim config JSON")->required();
  sim->add_option("--out", sim_args.out_dir, "Output directory")->required();
  std::uint64_t sim_seed = 0;
  auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "Override the config seed");
  sim->add_flag("--unrounded", sim_args.unrounded, "Include the unrounded_others column");

  OptimizeArgs opt_args;
  auto* opt = app.add_subcommand("optimize", "Search the threshold grid for the best classifier");
  opt->add_option("--data", opt_args.data, "Panel CSV")->required();
  opt->add_option("--rules", opt_args.rules, "Rule spec JSON")->required();
  opt->add_option("--measure", opt_args.measure, "stddev|centroid|dunn|db|silhouette");
  opt->add_option("--mode", opt_args.mode, "brute|de");
  opt->add_option("--out", opt_args.out, "Best-result JSON")->required();
  opt->add_option("--seed", opt_args.seed, "Seed for the heuristic mode");
  opt->add_option("--workers", opt_args.workers, "Worker threads for brute force");
  opt->add_option("--grid-cap", opt_args.grid_cap, "Candidate cap for brute force");
  opt->add_flag("--full-cost", opt_args.full_cost, "Embed the per-(time,class) cost terms");
  opt->add_option("--de-pop", opt_args.de_pop, "DE population size");
  opt->add_option("--de-gens", opt_args.de_gens, "DE generations");
  opt->add_option("--de-f", opt_args.de_f, "DE differential weight");
  opt->add_option("--de-cr", opt_args.de_cr, "DE crossover rate");

  ClassifyArgs cls_args;
  auto* cls = app.add_subcommand("classify", "Apply bound thresholds to a panel");
  cls->add_option("--data", cls_args.data, "Panel CSV")->required();
  cls->add_option("--rules", cls_args.rules, "Rule spec JSON")->required();
  cls->add_option("--bindings", cls_args.bindings, "Bindings JSON (optimize output)")->required();
  cls->add_option("--out", cls_args.out, "Labels CSV")->required();
  cls->add_option("--view-out", cls_args.view_out, "Also write the aggregated view CSV");

  EvaluateArgs eval_args;
  auto* eval = app.add_subcommand("evaluate", "Compare two labelings of the same panel");
  eval->add_option("--data", eval_args.data, "Panel CSV")->required();
  eval->add_option("--labels-a", eval_args.labels_a, "First labels CSV")->required();
  eval->add_option("--labels-b", eval_args.labels_b, "Second labels CSV")->required();
  eval->add_option("--features", eval_args.features, "Comma-separated feature sets");
  eval->add_option("--tables", eval_args.tables, "Contribution tables CSV");
  eval->add_option("--out", eval_args.out, "Report JSON")->required();
  eval->add_option("--derived-out", eval_args.derived_out, "Prefix for derived-attribute CSVs");
  eval->add_option("--repeats", eval_args.repeats, "Stratified splits");
  eval->add_option("--test-frac", eval_args.test_fraction, "Held-out fraction");
  eval->add_option("--k", eval_args.k, "Probe neighbours");
  eval->add_option("--seed", eval_args.seed, "Split seed");
  eval->add_option("--endowment", eval_args.endowment, "Tokens per round");
  eval->add_option("--mpcr", eval_args.mpcr, "Marginal per-capita return");
  eval->add_option("--group-size", eval_args.group_size, "Players per group");

  ReportArgs rep_args;
  auto* rep = app.add_subcommand("report", "Text tables and plot data from a run directory");
  rep->add_option("--in", rep_args.in_dir, "Directory with panel.csv and label CSVs")->required();
  rep->add_option("--out", rep_args.out, "Report text file")->required();
  rep->add_option("--attr", rep_args.attr, "Panel column to summarize");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (sim->parsed()) {
      if (sim_seed_opt->count() > 0) sim_args.seed = sim_seed;
      return cmd_simulate(sim_args);
    }
    if (opt->parsed()) return cmd_optimize(opt_args);
    if (cls->parsed()) return cmd_classify(cls_args);
    if (eval->parsed()) return cmd_evaluate(eval_args);
    if (rep->parsed()) return cmd_report(rep_args);
  } catch (const trc::Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
