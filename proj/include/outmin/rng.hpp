// SPDX-License-Identifier: Apache-2.0
// ris-outmin: outage-minimizing beamforming for RIS-aided mmWave downlinks

#ifndef OUTMIN_RNG_HPP
#define OUTMIN_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace outmin {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ splitmix64(tag + 0x632be59bd9b4e019ULL));
}

}  // namespace detail

/// Stream identifiers for the three independent substreams of a run.
enum class Stream : std::uint64_t { Scenario = 1, Solver = 2, Eval = 3 };

/// Deterministic RNG with hierarchical forking. A fork derives a child
/// generator from the parent's seed and a tag, independent of how much the
/// parent stream has been consumed. This keeps link-level draws identical
/// across scenario variants that skip some links, and makes Monte Carlo
/// samples independent of evaluation order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(detail::splitmix64(seed)) {}

  Rng fork(std::uint64_t tag) const { return Rng(detail::mix(seed_, tag)); }
  Rng fork(Stream s) const { return fork(static_cast<std::uint64_t>(s)); }
  Rng fork(std::uint64_t a, std::uint64_t b) const {
    return Rng(detail::mix(detail::mix(seed_, a), b));
  }

  std::uint64_t seed() const { return seed_; }

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (explicit, so the draw count per call is
  /// fixed and reproducible).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Circularly symmetric complex normal CN(0, variance).
  std::complex<double> cnormal(double variance = 1.0) {
    const double s = std::sqrt(variance * 0.5);
    return {s * normal(), s * normal()};
  }

  /// True with probability p.
  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace outmin

#endif  // OUTMIN_RNG_HPP
