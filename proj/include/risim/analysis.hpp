// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "risim/channel.hpp"
#include "risim/ris.hpp"

// Closed-form quantities the simulator is checked against: divergence
// measures between switching distributions, the fairness-window length
// that guarantees concentration, the genie (round-robin with per-user
// optimal configuration) throughput, and the within-class win probability.

namespace risim {

namespace detail {
inline void check_pmf_pair(std::span<const double> p, std::span<const double> q,
                           const char* where) {
  if (p.size() != q.size() || p.empty())
    throw std::invalid_argument(std::string(where) + ": distributions must be nonempty and equal length");
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0) || !(q[i] >= 0.0))
      throw std::invalid_argument(std::string(where) + ": negative probability");
    sp += p[i];
    sq += q[i];
  }
  if (std::abs(sp - 1.0) > 1e-6 || std::abs(sq - 1.0) > 1e-6)
    throw std::invalid_argument(std::string(where) + ": probabilities must sum to 1");
}
}  // namespace detail

// Total variation distance, 0.5 * sum_i |p_i - q_i|, in [0, 1].
inline double tv_distance(std::span<const double> p, std::span<const double> q) {
  detail::check_pmf_pair(p, q, "tv_distance");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

// Kullback-Leibler divergence sum_i p_i ln(p_i / q_i) in nats, with the
// 0 ln 0 = 0 convention. Undefined (error) when q vanishes where p does not.
inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
  detail::check_pmf_pair(p, q, "kl_divergence");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0)
      throw std::invalid_argument("kl_divergence: q has zero mass where p does not");
    s += p[i] * std::log(p[i] / q[i]);
  }
  return s;
}

struct BoundParams {
  double eps1 = 0.1;   // tolerance on the switching-state frequencies
  double eps2 = 0.1;   // tolerance on the per-user scheduling frequencies
  double eta1 = 0.1;   // allowed violation probability for eps1
  double eta2 = 0.1;   // allowed violation probability for eps2
  int n_states = 10;   // codebook size L
  int n_ues = 10;      // user count K
  std::int64_t ts_slots = 1;  // switching period in slots

  void validate() const {
    if (!(eps1 > 0.0) || !(eps2 > 0.0))
      throw std::invalid_argument("BoundParams: tolerances must be positive");
    if (!(eta1 > 0.0 && eta1 < 1.0) || !(eta2 > 0.0 && eta2 < 1.0))
      throw std::invalid_argument("BoundParams: violation probabilities must be in (0, 1)");
    if (n_states <= 0 || n_ues <= 0)
      throw std::invalid_argument("BoundParams: counts must be positive");
    if (ts_slots <= 0)
      throw std::invalid_argument("BoundParams: switching period must be a positive slot count");
  }
};

// Smallest fairness window (in slots) for which both empirical frequency
// vectors concentrate to the requested tolerances:
//   tc >= max( ts * ln(2L/eta1) / (2 eps1^2),  ln(2K/eta2) / (2 eps2^2) ).
inline std::int64_t required_tc_slots(const BoundParams& b) {
  b.validate();
  const double first =
      static_cast<double>(b.ts_slots) * std::log(2.0 * b.n_states / b.eta1) / (2.0 * b.eps1 * b.eps1);
  const double second = std::log(2.0 * b.n_ues / b.eta2) / (2.0 * b.eps2 * b.eps2);
  return static_cast<std::int64_t>(std::ceil(std::max(first, second)));
}

// Normalized sup-norm gap between an achieved per-user throughput vector
// and the target vector: ||achieved - target||_inf / ||target||_inf.
inline double optimality_gap(std::span<const double> achieved, std::span<const double> target) {
  if (achieved.size() != target.size() || achieved.empty())
    throw std::invalid_argument("optimality_gap: vectors must be nonempty and equal length");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < achieved.size(); ++i) {
    num = std::max(num, std::abs(achieved[i] - target[i]));
    den = std::max(den, std::abs(target[i]));
  }
  if (!(den > 0.0)) throw std::invalid_argument("optimality_gap: target vector is all zero");
  return num / den;
}

struct GenieResult {
  std::vector<double> per_ue;  // R_k^opt / K: long-run per-user throughput target
  double system = 0.0;         // sum of per_ue = (1/K) * sum_k R_k^opt
};

// Round-robin schedule with the codebook pointed optimally at each served
// user: user k is served every K-th slot at its best-codeword rate, so the
// long-run per-user throughput is R_k^opt / K.
inline GenieResult genie_throughput(std::span<const double> betas,
                                    std::span<const std::complex<double>> alphas,
                                    const std::vector<std::vector<std::complex<double>>>& responses,
                                    const RisCodebook& codebook, const LinkBudget& budget) {
  const std::size_t k_ues = betas.size();
  if (k_ues == 0 || alphas.size() != k_ues || responses.size() != k_ues)
    throw std::invalid_argument("genie_throughput: per-user inputs must be nonempty and equal length");
  GenieResult out;
  out.per_ue.reserve(k_ues);
  for (std::size_t k = 0; k < k_ues; ++k) {
    const auto [state, gain] = optimal_state_for_ue(codebook, responses[k]);
    (void)state;
    const double r_opt =
        spectral_efficiency_from_gain(betas[k] * std::norm(alphas[k]) * gain, budget);
    out.per_ue.push_back(r_opt / static_cast<double>(k_ues));
    out.system += r_opt / static_cast<double>(k_ues);
  }
  return out;
}

// Within a class of users sharing one codebook region and equal path loss,
// the proportional-fair winner under the aligned state is the one with the
// largest fading power; with i.i.d. unit-mean exponential fading powers
// each of the k_class members wins with probability exactly 1 / k_class.
inline double class_win_oracle(int k_class) {
  if (k_class <= 0) throw std::invalid_argument("class_win_oracle: class size must be positive");
  return 1.0 / static_cast<double>(k_class);
}

}  // namespace risim
