#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace trc::cli {

/// Provenance record written alongside every subcommand's outputs. Carries
/// the wall-clock duration, so reruns are only byte-identical in the
/// non-manifest outputs.
struct RunManifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::filesystem::path>> inputs;
  std::vector<std::pair<std::string, std::filesystem::path>> outputs;
  std::uint64_t seed = 0;
  double duration_seconds = 0.0;

  /// Digests every input file (FNV-1a 64) and writes the manifest JSON.
  void write(const std::filesystem::path& path) const;
};

std::string fnv1a64_hex(const std::string& bytes);

}  // namespace trc::cli
