#ifndef HSDU_RNG_HPP
#define HSDU_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hsdu {

/// Counter-based pseudorandom stream: draw i of stream `seed` is
/// mix64(seed + (i+1) * 0x9E3779B97F4A7C15), the SplitMix64 finalizer of
/// Steele et al. Bit-exact across platforms; no hidden state beyond the
/// counter, so streams can be recreated or split deterministically.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; draws two uniforms per pair and
  /// caches the second variate.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  /// Zero-mean Laplacian of scale b via inverse CDF.
  double laplacian(double b) {
    double u = uniform() - 0.5;
    double sign = u < 0 ? -1.0 : 1.0;
    return -b * sign * std::log(1.0 - 2.0 * std::abs(u));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace hsdu

#endif
