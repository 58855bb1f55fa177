// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>

namespace risim {

// One SplitMix64 step. Used to mix seeds and tags into stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Deterministic RNG for simulation trajectories.
//
// Wraps std::mt19937_64, whose output sequence is fully specified by the
// C++ standard, and implements the floating-point transforms by hand
// (std::*_distribution output is implementation-defined). Same seed,
// same draw order, same bits -- on any compiler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Derives an independent stream from (base_seed, stream, index), e.g.
  // one stream per Monte Carlo trial. Mixing is SplitMix64, so nearby
  // indices give unrelated streams.
  static Rng derive(std::uint64_t base_seed, std::uint64_t stream, std::uint64_t index = 0) {
    std::uint64_t s = base_seed;
    splitmix64(s);
    s ^= 0x632BE59BD9B4E019ULL * (stream + 1);
    splitmix64(s);
    s ^= 0x9E3779B97F4A7C15ULL * (index + 1);
    return Rng(splitmix64(s));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller. Two uniforms per draw, no cached spare.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Circularly-symmetric complex normal with unit variance: each component
  // is N(0, 1/2), so E|z|^2 = 1.
  std::complex<double> cnormal() {
    const double s = std::numbers::sqrt2 / 2.0;
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
  }

  // Samples an index from a probability vector by CDF inversion.
  // Zero-probability entries are never returned.
  std::size_t discrete(std::span<const double> probs) {
    const double u = uniform();
    double cum = 0.0;
    std::size_t last = 0;
    bool any = false;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] <= 0.0) continue;
      any = true;
      last = i;
      cum += probs[i];
      if (u < cum) return i;
    }
    if (!any) throw std::invalid_argument("Rng::discrete: all probabilities are zero");
    return last;  // guards against rounding when u ~ 1 and sum(probs) ~ 1
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace risim
