#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cse {

/// splitmix64 finalizer. Decorrelates nearby seeds before they reach the engine.
inline std::uint64_t mix_bits(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

/// Derive an independent sub-stream seed from (seed, stream). Used for the
/// per-run splittable scheme: run b of a study draws from mix_seed(seed, b).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix_bits(seed + 0x9E3779B97F4A7C15ULL * (stream + 1));
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return mix_seed(mix_seed(seed, a), b);
}

/// Deterministic generator: mt19937_64 with hand-rolled uniform/normal draws,
/// so streams are identical across standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(mix_bits(seed)) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on (0, 1].
  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; the sine partner is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Uniform integer in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % bound;
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cse
