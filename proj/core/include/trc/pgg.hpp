#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "trc/evaluation.hpp"
#include "trc/panel.hpp"
#include "trc/rng.hpp"
#include "trc/rules.hpp"

namespace trc {

struct PggParams {
  int group_size = 4;
  double endowment = 20.0;
  double mpcr = 0.4;  // marginal per-capita return; social dilemma needs 1/group_size < mpcr < 1
  int rounds = 10;
  std::uint64_t seed = 0;
};

void validate(const PggParams& params);  // throws Error("InvalidParams")

enum class ArchetypeKind { FreeRider, ConditionalCooperator, TriangleContributor, Random };

ArchetypeKind archetype_kind_from_name(std::string_view name);
std::string_view archetype_kind_name(ArchetypeKind kind);

/// Behavioural profile. `peak` and `initial_belief` default to endowment/2
/// when unset; `slope` scales the conditional cooperator's response.
struct Archetype {
  ArchetypeKind kind = ArchetypeKind::FreeRider;
  double slope = 1.0;
  std::optional<double> peak;
  double noise_sd = 1.0;
  std::optional<double> initial_belief;
};

struct RosterEntry {
  int count = 0;
  Archetype archetype;
};

/// Synthetic panel with planted labels. Group memberships and the exact
/// (unrounded) co-player means are kept so consistency checks stay exact.
struct SimOutput {
  TemporalDataset panel;  // columns: contribution, belief, others
  Labeling truth;
  std::vector<ContributionTable> tables;            // per object, panel order
  std::vector<std::vector<double>> unrounded_others;  // [object][time]
  std::vector<std::vector<std::size_t>> groups;       // object indices per group
};

/// Round gain: endowment - own + mpcr * sum(all contributions).
/// Throws Error("OutOfRangeContribution") when any value leaves [0, endowment].
double payoff(double own, const std::vector<double>& all, const PggParams& params);

/// Noiseless intended contribution for a given belief about the co-players'
/// average. Only the Random kind consumes the RNG; pass nullptr otherwise.
int response(const Archetype& archetype, int belief, const PggParams& params, Rng* rng = nullptr);

/// 21-entry elicited schedule: entry h is response(archetype, h) with noise
/// disabled. Random archetypes draw their entries and require an RNG.
ContributionTable contribution_table(const Archetype& archetype, const PggParams& params,
                                     Rng* rng = nullptr);

/// Simulates `rounds` rounds for the roster: players are shuffled into fixed
/// groups of group_size (seeded by params.seed); round-1 beliefs start from
/// initial_belief, later beliefs track the previous round's rounded
/// co-player average, both with rounded Gaussian noise; contributions add
/// rounded noise to the archetype response and clamp to [0, endowment].
/// Deterministic per seed (draw order: tables in player order, then per
/// round and player belief noise, response, contribution noise).
/// Throws Error("RosterSizeError") when the player count is not divisible by
/// group_size.
SimOutput simulate(const PggParams& params, const std::vector<RosterEntry>& roster);

/// Parses {params:{...}, roster:[{count, kind, ...}], seed} JSON.
struct SimConfig {
  PggParams params;
  std::vector<RosterEntry> roster;
};
SimConfig parse_sim_config(const std::string& text);
SimConfig load_sim_config(const std::filesystem::path& path);

/// Writers for the simulator's CSV surfaces.
void write_truth_csv(const SimOutput& sim, const std::filesystem::path& path);
void write_tables_csv(const SimOutput& sim, const std::filesystem::path& path);
void write_sim_panel_csv(const SimOutput& sim, const std::filesystem::path& path,
                         bool include_unrounded_others = false);

/// Tables keyed by object id, as derive_attributes expects.
ContributionTables tables_by_id(const SimOutput& sim);

}  // namespace trc
