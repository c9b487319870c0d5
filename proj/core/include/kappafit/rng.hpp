#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace kappafit {

/// Seedable pseudo-random source with platform-independent derived draws.
///
/// The raw engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Uniform and normal variates are computed here rather than through
/// <random> distributions, whose algorithms are implementation-defined:
///   - uniform01: top 53 bits of one engine output, scaled to [0, 1)
///   - normal: Marsaglia polar method, caching the second variate
/// so a given seed reproduces the same stream on any conforming toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double r2 = 0.0;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      r2 = u * u + v * v;
    } while (r2 >= 1.0 || r2 == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(r2) / r2);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

  /// Derives an independent child generator (SplitMix64 over the next output).
  Rng split() {
    std::uint64_t x = engine_() + 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return Rng(x ^ (x >> 31));
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace kappafit
