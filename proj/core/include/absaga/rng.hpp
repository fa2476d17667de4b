#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace absaga {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Per-node stream seeds: node i gets splitmix64(master + (i+1) * golden ratio).
// The centralized engine uses node index 0 so that n=1 networks replay exactly.
inline std::uint64_t node_stream_seed(std::uint64_t master, int node) {
  return splitmix64(master + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(node + 1));
}

// mt19937_64 core with hand-rolled output maps. The engine's output sequence is
// pinned by the standard; std::*_distribution is not, and reproducible traces
// require stable draws across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform index in [0, m). Modulo bias is < m / 2^64, irrelevant at sane m.
  int next_below(int m) { return static_cast<int>(eng_() % static_cast<std::uint64_t>(m)); }

  bool next_bernoulli(double p) { return next_unit() < p; }

  // Standard normal via Box-Muller, spare cached.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - next_unit();  // (0, 1]
    double u2 = next_unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace absaga
