#pragma once

// Reproducible random numbers for the trajectory ensembles.
//
// Child streams are derived from (master_seed, trajectory_index) with
// splitmix64, then fed to std::mt19937_64 (whose output sequence is pinned
// by the C++ standard). Uniform and normal variates are mapped by hand —
// the std <random> distributions are implementation-defined and would break
// cross-toolchain reproducibility.

#include <cmath>
#include <cstdint>
#include <random>

namespace qduet {

inline constexpr const char* kPrngDescription =
    "splitmix64(master_seed + (index+1)*0x9E3779B97F4A7C15) -> mt19937_64; "
    "uniform = (x>>11 + 0.5)*2^-53; normal = Box-Muller";

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t child_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(master_seed + index * 0x9E3779B97F4A7C15ULL);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Strictly inside (0, 1); safe under log().
  double uniform() {
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  // Standard normal, Box-Muller with the spare cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

} // namespace qduet
