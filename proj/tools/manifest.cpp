#include "manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "trc/error.hpp"
#include "trc/version.hpp"

namespace trc::cli {

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void RunManifest::write(const std::filesystem::path& path) const {
  nlohmann::json doc;
  doc["subcommand"] = subcommand;
  doc["tool_version"] = trc::kVersion;
  doc["seed"] = seed;
  doc["duration_seconds"] = duration_seconds;
  nlohmann::json in, digests, out;
  for (const auto& [name, p] : inputs) {
    in[name] = p.string();
    std::ifstream f(p, std::ios::binary);
    if (f) {
      std::ostringstream buf;
      buf << f.rdbuf();
      digests[p.string()] = "fnv1a64:" + fnv1a64_hex(buf.str());
    }
  }
  for (const auto& [name, p] : outputs) out[name] = p.string();
  doc["inputs"] = std::move(in);
  doc["input_digests"] = std::move(digests);
  doc["outputs"] = std::move(out);

  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("IoError", "cannot write manifest '" + path.string() + "'");
  f << doc.dump(2) << '\n';
}

}  // namespace trc::cli
