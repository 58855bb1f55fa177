// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "risim/channel.hpp"
#include "risim/rng.hpp"

// Surface configuration codebook and randomized switching.
//
// The cascaded-direction plane is tiled into n_states regions by Lloyd
// clustering of the user directions (deterministic farthest-point seeding,
// lowest-index tie-breaks, bounded iteration count). Each region
// contributes one codeword, the array response at the region centroid, and
// is sampled with probability |region| / K. The controller redraws the
// active codeword i.i.d. from that distribution on a fixed slot period,
// independent of the scheduler.

namespace risim {

struct RisCodebook {
  std::vector<std::vector<std::complex<double>>> phase_profiles;
  std::vector<SteeringDirection> centroids;

  int size() const { return static_cast<int>(phase_profiles.size()); }
};

struct SamplingPmf {
  std::vector<double> probs;

  void validate() const {
    double sum = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0)) throw std::invalid_argument("SamplingPmf: negative probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("SamplingPmf: probabilities sum to " + std::to_string(sum));
  }
};

struct TileResult {
  RisCodebook codebook;
  SamplingPmf pmf;
  std::vector<int> assignment;  // region index per input direction
};

namespace detail {

inline double sq_dist(const SteeringDirection& a, const SteeringDirection& b) {
  const double du = a.u - b.u;
  const double dv = a.v - b.v;
  return du * du + dv * dv;
}

// Farthest-point seeding: start from direction 0, then repeatedly add the
// direction maximizing the min distance to already-chosen seeds. Strict
// comparisons make every tie resolve to the lowest index.
inline std::vector<SteeringDirection> farthest_point_seeds(
    std::span<const SteeringDirection> dirs, int n_seeds) {
  std::vector<SteeringDirection> seeds;
  seeds.reserve(static_cast<std::size_t>(n_seeds));
  seeds.push_back(dirs[0]);
  std::vector<double> min_d(dirs.size(), std::numeric_limits<double>::infinity());
  while (static_cast<int>(seeds.size()) < n_seeds) {
    for (std::size_t i = 0; i < dirs.size(); ++i)
      min_d[i] = std::min(min_d[i], sq_dist(dirs[i], seeds.back()));
    std::size_t best = 0;
    for (std::size_t i = 1; i < dirs.size(); ++i)
      if (min_d[i] > min_d[best]) best = i;
    seeds.push_back(dirs[best]);
  }
  return seeds;
}

}  // namespace detail

// Tiles user directions into n_states regions and builds the matching
// codebook and sampling distribution. Surplus regions (n_states > number
// of distinct directions) end up empty: probability 0 and a broadside
// placeholder centroid. The run is fully deterministic.
inline TileResult tile_and_build(std::span<const SteeringDirection> ue_directions, int n_states,
                                 const ArrayGeometry& geom) {
  if (n_states <= 0) throw std::invalid_argument("tile_and_build: n_states must be positive");
  if (ue_directions.empty())
    throw std::invalid_argument("tile_and_build: need at least one user direction");
  geom.validate();

  const std::size_t k_ues = ue_directions.size();
  std::vector<SteeringDirection> centroids =
      detail::farthest_point_seeds(ue_directions, n_states);
  std::vector<int> assignment(k_ues, 0);

  for (int iter = 0; iter < 50; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < k_ues; ++i) {
      int best = 0;
      double best_d = detail::sq_dist(ue_directions[i], centroids[0]);
      for (int c = 1; c < n_states; ++c) {
        const double d = detail::sq_dist(ue_directions[i], centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assignment[i] != best) {
        assignment[i] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;
    for (int c = 0; c < n_states; ++c) {
      double su = 0.0, sv = 0.0;
      int count = 0;
      for (std::size_t i = 0; i < k_ues; ++i) {
        if (assignment[i] != c) continue;
        su += ue_directions[i].u;
        sv += ue_directions[i].v;
        ++count;
      }
      if (count > 0) centroids[c] = {su / count, sv / count};
      // empty: keep previous centroid during iteration
    }
  }

  TileResult out;
  out.assignment = std::move(assignment);
  out.pmf.probs.assign(static_cast<std::size_t>(n_states), 0.0);
  for (int region : out.assignment)
    out.pmf.probs[static_cast<std::size_t>(region)] += 1.0 / static_cast<double>(k_ues);
  for (int c = 0; c < n_states; ++c) {
    const bool empty = out.pmf.probs[static_cast<std::size_t>(c)] <= 0.0;
    const SteeringDirection dir = empty ? SteeringDirection{0.0, 0.0} : centroids[c];
    out.codebook.centroids.push_back(dir);
    out.codebook.phase_profiles.push_back(steering_vector(geom, dir));
  }
  out.pmf.validate();
  return out;
}

// Draws a codeword index from the sampling distribution.
inline int sample_state(const SamplingPmf& pmf, Rng& rng) {
  return static_cast<int>(rng.discrete(pmf.probs));
}

// Slot-clocked switching state. ts_slots is the redraw period in slots;
// 0 is the never-switch sentinel (the slot-0 draw then holds forever).
struct SwitchingSchedule {
  std::int64_t ts_slots = 1;
  int current_state = 0;
  std::int64_t block_index = -1;  // -1 until the slot-0 draw

  // Advances the schedule to `slot`. The state is redrawn at slot 0 and
  // afterwards exactly when slot % ts_slots == 0 (never again for the
  // ts_slots == 0 sentinel). Returns true when a redraw happened.
  bool advance(std::int64_t slot, const SamplingPmf& pmf, Rng& rng) {
    if (ts_slots < 0) throw std::invalid_argument("SwitchingSchedule: negative period");
    const bool redraw = (slot == 0) || (ts_slots > 0 && slot % ts_slots == 0);
    if (redraw) {
      current_state = sample_state(pmf, rng);
      ++block_index;
    }
    return redraw;
  }
};

// Best codeword for a given user response: maximizes the beam gain
// |phi^H a|^2, ties to the lowest index. Returns (index, gain).
inline std::pair<int, double> optimal_state_for_ue(const RisCodebook& codebook,
                                                   std::span<const std::complex<double>> response) {
  if (codebook.size() == 0)
    throw std::invalid_argument("optimal_state_for_ue: empty codebook");
  int best = 0;
  double best_gain = -1.0;
  for (int c = 0; c < codebook.size(); ++c) {
    const double g = std::norm(inner_product_conj(codebook.phase_profiles[c], response));
    if (g > best_gain) {
      best_gain = g;
      best = c;
    }
  }
  return {best, best_gain};
}

}  // namespace risim
