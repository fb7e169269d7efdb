#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace trc {

/// Round half away from zero toward +infinity: 2.5 -> 3, -0.5 -> 0, -1.5 -> -1.
inline double round_half_up(double x) { return std::floor(x + 0.5); }

/// Seeded random source with hand-rolled derived draws. std::mt19937_64's
/// output sequence is standardized, while std::uniform_*_distribution and
/// std::normal_distribution are implementation-defined; mapping the raw
/// stream ourselves keeps every simulation and search reproducible
/// bit-for-bit for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi], both inclusive.
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
  }

  /// Gaussian with mean 0 via Box-Muller. Consumes exactly two engine draws
  /// per call, also when sd == 0, so call sites keep a fixed stream layout.
  double gaussian(double sd) {
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    return sd * r * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Fisher-Yates shuffle driven by this engine.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_u64() % i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace trc
