#ifndef RRNAR_RNG_HPP
#define RRNAR_RNG_HPP

#include <cmath>
#include <cstdint>

namespace rrnar {

// SplitMix64 finalizer. Bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: output_i = mix64(seed + (i+1)*golden).
/// State is just (seed, counter), so streams are reproducible across
/// platforms and trivially splittable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller on explicitly drawn uniforms.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    // u1 in (0,1] so log(u1) is finite.
    double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 6.283185307179586476925286766559 * u2;
    cached_ = radius * std::sin(angle);
    have_cached_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

/// Child-stream seed for a (cell, replication) pair of a Monte Carlo run:
/// child = mix64(mix64(mix64(master) ^ cell) ^ rep). Re-gridding a study
/// leaves untouched (cell, rep) streams identical.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t cell,
                                std::uint64_t rep) {
  return mix64(mix64(mix64(master) ^ cell) ^ rep);
}

}  // namespace rrnar

#endif
