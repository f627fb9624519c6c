#pragma once

#include <cmath>
#include <cstdint>

namespace carnot {

/// Counter-based pseudo-random generator (splitmix64 output function).
///
/// Every draw is one 64-bit mix of an advancing counter, so independent
/// substreams are cheap: substream k of seed s starts from a counter offset
/// derived by mixing (s, k).  Paths keyed by index are therefore reproducible
/// independently of how work is distributed over threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix(seed ^ 0x9e3779b97f4a7c15ull)) {}

  /// Substream `stream` of the generator seeded with `seed`.
  Rng(std::uint64_t seed, std::uint64_t stream)
      : state_(mix(mix(seed ^ 0x9e3779b97f4a7c15ull) + mix(stream ^ 0xbf58476d1ce4e5b9ull))) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (deterministic across platforms,
  /// unlike std::normal_distribution).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace carnot
