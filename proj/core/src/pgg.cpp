#include "trc/pgg.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "io_util.hpp"
#include "trc/error.hpp"

namespace trc {

void validate(const PggParams& params) {
  if (params.group_size < 2) throw Error("InvalidParams", "group_size must be >= 2");
  if (params.endowment <= 0.0) throw Error("InvalidParams", "endowment must be positive");
  if (params.rounds < 1) throw Error("InvalidParams", "rounds must be >= 1");
  const double lo = 1.0 / static_cast<double>(params.group_size);
  if (!(params.mpcr > lo && params.mpcr < 1.0))
    throw Error("InvalidParams", "mpcr must satisfy 1/group_size < mpcr < 1");
}

ArchetypeKind archetype_kind_from_name(std::string_view name) {
  if (name == "FreeRider" || name == "free_rider") return ArchetypeKind::FreeRider;
  if (name == "ConditionalCooperator" || name == "conditional_cooperator")
    return ArchetypeKind::ConditionalCooperator;
  if (name == "TriangleContributor" || name == "triangle")
    return ArchetypeKind::TriangleContributor;
  if (name == "Random" || name == "random") return ArchetypeKind::Random;
  throw Error("InvalidParams", "unknown archetype kind '" + std::string(name) + "'");
}

std::string_view archetype_kind_name(ArchetypeKind kind) {
  switch (kind) {
    case ArchetypeKind::FreeRider: return "FreeRider";
    case ArchetypeKind::ConditionalCooperator: return "ConditionalCooperator";
    case ArchetypeKind::TriangleContributor: return "TriangleContributor";
    case ArchetypeKind::Random: return "Random";
  }
  return "?";
}

double payoff(double own, const std::vector<double>& all, const PggParams& params) {
  validate(params);
  double sum = 0.0;
  for (double g : all) {
    if (g < 0.0 || g > params.endowment)
      throw Error("OutOfRangeContribution",
                  "contribution " + detail::format_double(g) + " outside [0, " +
                      detail::format_double(params.endowment) + "]");
    sum += g;
  }
  if (own < 0.0 || own > params.endowment)
    throw Error("OutOfRangeContribution", "own contribution outside [0, endowment]");
  return params.endowment - own + params.mpcr * sum;
}

namespace {

int clamp_tokens(double v, double endowment) {
  return static_cast<int>(std::clamp(v, 0.0, endowment));
}

}  // namespace

int response(const Archetype& archetype, int belief, const PggParams& params, Rng* rng) {
  const double endowment = params.endowment;
  switch (archetype.kind) {
    case ArchetypeKind::FreeRider:
      return 0;
    case ArchetypeKind::ConditionalCooperator:
      return clamp_tokens(round_half_up(archetype.slope * static_cast<double>(belief)), endowment);
    case ArchetypeKind::TriangleContributor: {
      const double peak = archetype.peak.value_or(endowment / 2.0);
      const double b = static_cast<double>(belief);
      // Rises with unit slope to `peak` tokens at belief == peak, then
      // declines linearly to 0 at the endowment.
      double v;
      if (b <= peak)
        v = b;
      else if (endowment - peak <= 0.0)
        v = peak;
      else
        v = peak * (endowment - b) / (endowment - peak);
      return clamp_tokens(round_half_up(v), endowment);
    }
    case ArchetypeKind::Random: {
      if (!rng) throw Error("InvalidParams", "Random archetype response needs an RNG");
      return rng->uniform_int(0, static_cast<int>(endowment));
    }
  }
  return 0;
}

ContributionTable contribution_table(const Archetype& archetype, const PggParams& params,
                                     Rng* rng) {
  ContributionTable table{};
  for (int h = 0; h <= 20; ++h)
    table[static_cast<std::size_t>(h)] = static_cast<double>(response(archetype, h, params, rng));
  return table;
}

SimOutput simulate(const PggParams& params, const std::vector<RosterEntry>& roster) {
  validate(params);
  std::vector<Archetype> players;
  for (const auto& entry : roster) {
    if (entry.count < 0) throw Error("InvalidParams", "roster count must be non-negative");
    for (int i = 0; i < entry.count; ++i) players.push_back(entry.archetype);
  }
  const std::size_t n = players.size();
  if (n == 0 || n % static_cast<std::size_t>(params.group_size) != 0)
    throw Error("RosterSizeError", std::to_string(n) + " players cannot form groups of " +
                                       std::to_string(params.group_size));

  // Zero-padded ids keep lexicographic and positional order identical.
  std::size_t id_width = 1;
  for (std::size_t v = n; v >= 10; v /= 10) ++id_width;
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string digits = std::to_string(i + 1);
    ids[i] = "p" + std::string(id_width - digits.size(), '0') + digits;
  }

  Rng rng(params.seed);

  std::vector<std::size_t> shuffled(n);
  for (std::size_t i = 0; i < n; ++i) shuffled[i] = i;
  rng.shuffle(shuffled);
  const auto group_size = static_cast<std::size_t>(params.group_size);
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> group_of(n);
  for (std::size_t g = 0; g * group_size < n; ++g) {
    std::vector<std::size_t> members(shuffled.begin() + static_cast<std::ptrdiff_t>(g * group_size),
                                     shuffled.begin() + static_cast<std::ptrdiff_t>((g + 1) * group_size));
    for (std::size_t m : members) group_of[m] = g;
    groups.push_back(std::move(members));
  }

  std::vector<ContributionTable> tables(n);
  for (std::size_t i = 0; i < n; ++i) tables[i] = contribution_table(players[i], params, &rng);

  const auto T = static_cast<std::size_t>(params.rounds);
  std::vector<std::vector<int>> beliefs(n, std::vector<int>(T, 0));
  std::vector<std::vector<int>> contributions(n, std::vector<int>(T, 0));
  std::vector<std::vector<int>> others(n, std::vector<int>(T, 0));
  std::vector<std::vector<double>> unrounded(n, std::vector<double>(T, 0.0));

  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const Archetype& a = players[i];
      double base;
      if (t == 0)
        base = round_half_up(a.initial_belief.value_or(params.endowment / 2.0));
      else
        base = static_cast<double>(others[i][t - 1]);
      const int belief =
          clamp_tokens(base + round_half_up(rng.gaussian(a.noise_sd)), params.endowment);
      beliefs[i][t] = belief;
      const int intended = response(a, belief, params, &rng);
      contributions[i][t] = clamp_tokens(
          static_cast<double>(intended) + round_half_up(rng.gaussian(a.noise_sd)),
          params.endowment);
    }
    for (const auto& members : groups) {
      int group_sum = 0;
      for (std::size_t m : members) group_sum += contributions[m][t];
      for (std::size_t m : members) {
        const double u = static_cast<double>(group_sum - contributions[m][t]) /
                         static_cast<double>(params.group_size - 1);
        unrounded[m][t] = u;
        others[m][t] = static_cast<int>(round_half_up(u));
      }
    }
  }

  std::vector<int> time_points(T);
  for (std::size_t t = 0; t < T; ++t) time_points[t] = static_cast<int>(t) + 1;
  std::vector<double> values(n * T * 3);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < T; ++t) {
      values[(i * T + t) * 3 + 0] = contributions[i][t];
      values[(i * T + t) * 3 + 1] = beliefs[i][t];
      values[(i * T + t) * 3 + 2] = others[i][t];
    }
  }

  SimOutput out{TemporalDataset(ids, time_points, {"contribution", "belief", "others"},
                                std::move(values)),
                Labeling{}, std::move(tables), std::move(unrounded), std::move(groups)};
  out.truth.object_ids = ids;
  out.truth.classes = {"FreeRider", "ConditionalCooperator", "TriangleContributor", "Random"};
  for (std::size_t i = 0; i < n; ++i)
    out.truth.labels.emplace_back(archetype_kind_name(players[i].kind));
  // Keep only the archetype kinds that actually occur, in canonical order.
  std::vector<std::string> present;
  for (const auto& cls : out.truth.classes)
    if (std::find(out.truth.labels.begin(), out.truth.labels.end(), cls) != out.truth.labels.end())
      present.push_back(cls);
  out.truth.classes = std::move(present);
  return out;
}

SimConfig parse_sim_config(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("SyntaxError", e.what());
  }
  SimConfig config;
  try {
    if (doc.contains("params")) {
      const auto& p = doc["params"];
      config.params.group_size = p.value("group_size", config.params.group_size);
      config.params.endowment = p.value("endowment", config.params.endowment);
      config.params.mpcr = p.value("mpcr", config.params.mpcr);
      config.params.rounds = p.value("rounds", config.params.rounds);
    }
    config.params.seed = doc.value("seed", config.params.seed);
    if (!doc.contains("roster") || !doc["roster"].is_array() || doc["roster"].empty())
      throw Error("SyntaxError", "sim config needs a non-empty roster array");
    for (const auto& r : doc["roster"]) {
      RosterEntry entry;
      if (!r.contains("count") || !r.contains("kind"))
        throw Error("SyntaxError", "roster entries need count and kind");
      entry.count = r["count"].get<int>();
      entry.archetype.kind = archetype_kind_from_name(r["kind"].get<std::string>());
      entry.archetype.slope = r.value("slope", entry.archetype.slope);
      if (r.contains("peak")) entry.archetype.peak = r["peak"].get<double>();
      entry.archetype.noise_sd = r.value("noise_sd", entry.archetype.noise_sd);
      if (r.contains("initial_belief"))
        entry.archetype.initial_belief = r["initial_belief"].get<double>();
      config.roster.push_back(entry);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("SyntaxError", e.what());
  }
  return config;
}

SimConfig load_sim_config(const std::filesystem::path& path) {
  return parse_sim_config(detail::read_file(path));
}

void write_truth_csv(const SimOutput& sim, const std::filesystem::path& path) {
  detail::write_file(path, sim.truth.to_csv());
}

void write_tables_csv(const SimOutput& sim, const std::filesystem::path& path) {
  std::string out = "object_id";
  for (int h = 0; h <= 20; ++h) out += ",h" + std::to_string(h);
  out += '\n';
  for (std::size_t i = 0; i < sim.panel.object_count(); ++i) {
    out += sim.panel.object_ids()[i];
    for (double v : sim.tables[i]) {
      out += ',';
      out += detail::format_double(v);
    }
    out += '\n';
  }
  detail::write_file(path, out);
}

void write_sim_panel_csv(const SimOutput& sim, const std::filesystem::path& path,
                         bool include_unrounded_others) {
  if (!include_unrounded_others) {
    write_panel_csv(sim.panel, path);
    return;
  }
  std::string out = "object_id,time,contribution,belief,others,unrounded_others\n";
  for (std::size_t i = 0; i < sim.panel.object_count(); ++i) {
    for (std::size_t t = 0; t < sim.panel.time_count(); ++t) {
      out += sim.panel.object_ids()[i];
      out += ',';
      out += std::to_string(sim.panel.time_points()[t]);
      for (std::size_t a = 0; a < 3; ++a) {
        out += ',';
        out += detail::format_double(sim.panel.value(i, t, a));
      }
      out += ',';
      out += detail::format_double(sim.unrounded_others[i][t]);
      out += '\n';
    }
  }
  detail::write_file(path, out);
}

ContributionTables tables_by_id(const SimOutput& sim) {
  ContributionTables tables;
  for (std::size_t i = 0; i < sim.panel.object_count(); ++i)
    tables.emplace(sim.panel.object_ids()[i], sim.tables[i]);
  return tables;
}

}  // namespace trc
