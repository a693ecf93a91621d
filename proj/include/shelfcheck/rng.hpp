#ifndef SHELFCHECK_RNG_HPP_
#define SHELFCHECK_RNG_HPP_

#include <cmath>
#include <cstdint>

namespace shelfcheck {

/// SplitMix64 stream with hand-rolled samplers. The standard library's
/// distributions are implementation-defined, so everything random in this
/// project goes through this generator to keep outputs bit-reproducible
/// across platforms (and reimplementable in other languages).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 bits of precision.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). n must be positive; modulo bias is
  /// negligible for the small ranges used here.
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  bool bernoulli(double p) { return next_double() < p; }

  /// Standard normal via Box-Muller (one value per call, mate discarded,
  /// which keeps the draw count per event fixed).
  double gaussian() {
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  /// Gaussian with deviation sigma, rejected outside +-3 sigma.
  double gaussian_truncated(double sigma) {
    if (sigma <= 0.0) return 0.0;
    double g = gaussian();
    while (std::abs(g) > 3.0) g = gaussian();
    return g * sigma;
  }

  /// Poisson by inversion of the exponential gaps (Knuth). Fine for the
  /// small means used by the noise model.
  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    double p = 1.0;
    int k = 0;
    do {
      ++k;
      p *= next_double();
    } while (p > limit);
    return k - 1;
  }

  /// Independent substream; distinct tags give uncorrelated streams.
  Rng split(std::uint64_t tag) const {
    Rng derived(state_ ^ (0xA0761D6478BD642FULL + tag * 0xE7037ED1A0B428DBULL));
    derived.next_u64();
    return derived;
  }

 private:
  std::uint64_t state_;
};

}  // namespace shelfcheck

#endif  // SHELFCHECK_RNG_HPP_
