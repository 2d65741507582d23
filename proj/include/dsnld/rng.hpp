#ifndef DSNLD_RNG_HPP
#define DSNLD_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>

// Counter-based random number generation.
//
// Every random draw in the project is a pure function
//   word(key, counter) -> uint64
// so that environment noise, particle noise and initial sampling can be
// replayed independently of each other, of thread count and of call order.
//
// Generator id "sm64c-v1": the SplitMix64 output finalizer applied to
// key + counter * golden gamma, i.e. SplitMix64 with skip-ahead, keyed per
// stream. Streams are derived by hashing a user seed with a stream name
// ("environment", "particles", "initial", ...) and optional substream
// indices. Gaussians come from the inverse normal CDF (Wichura's AS 241),
// which keeps the draw-to-counter mapping one-to-one and platform-stable.

namespace dsnld::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 output finalizer (no increment).
constexpr std::uint64_t finalize64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// FNV-1a over a byte string; used to hash stream names and file contents.
constexpr std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Inverse of the standard normal CDF, AS 241 (PPND16), |error| < 1e-15.
inline double inverse_normal_cdf(double p) {
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  if (r <= 0.0) return q < 0.0 ? -std::numeric_limits<double>::infinity()
                               : std::numeric_limits<double>::infinity();
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -x : x;
}

/// One keyed counter stream. Copyable, stateless, safe to share.
struct Stream {
  std::uint64_t key = 0;

  static Stream derive(std::uint64_t seed, std::string_view name) {
    return Stream{finalize64(seed ^ fnv1a(name))};
  }

  /// Child stream for index `idx` (per-realization, per-particle, ...).
  Stream substream(std::uint64_t idx) const {
    return Stream{finalize64(key ^ finalize64(idx + 0x6a09e667f3bcc909ULL))};
  }

  std::uint64_t word(std::uint64_t counter) const {
    return finalize64(key + kGolden * (counter + 1));
  }

  /// Uniform draw in the open interval (0, 1).
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(word(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal draw via the inverse CDF.
  double gaussian(std::uint64_t counter) const {
    return inverse_normal_cdf(uniform(counter));
  }
};

inline constexpr std::string_view kGeneratorId = "sm64c-v1";

}  // namespace dsnld::rng

#endif
