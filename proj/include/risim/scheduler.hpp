// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

// Proportional-fair and round-robin downlink scheduling.
//
// The PF scheduler picks k* = argmax_k R_k(t) / T_k(t) and maintains the
// exponentially-weighted average throughput
//   T_k(t+1) = (1 - 1/tc) T_k(t) + 1{k = k*} (1/tc) R_k(t),
// where tc (in slots) is the fairness horizon. Large tc makes the metric
// opportunistic; small tc forces short-term fairness.

namespace risim {

struct SchedulerState {
  std::vector<double> ewma;               // T_k, strictly positive
  double tc_slots = 1000.0;               // fairness window in slots
  std::vector<std::int64_t> sched_counts; // slots each user was selected
  std::int64_t slot = 0;                  // slots elapsed (update count)

  static SchedulerState make(int n_ues, double tc_slots, double ewma_init = 1e-3) {
    if (n_ues <= 0) throw std::invalid_argument("SchedulerState: need at least one user");
    if (!(tc_slots >= 1.0)) throw std::invalid_argument("SchedulerState: tc_slots must be >= 1");
    if (!(ewma_init > 0.0)) throw std::invalid_argument("SchedulerState: ewma_init must be > 0");
    SchedulerState s;
    s.ewma.assign(static_cast<std::size_t>(n_ues), ewma_init);
    s.sched_counts.assign(static_cast<std::size_t>(n_ues), 0);
    s.tc_slots = tc_slots;
    return s;
  }
};

struct ScheduleDecision {
  int selected_ue = 0;
  std::vector<double> metrics;
  bool is_retransmission = false;
};

// Index of the PF winner; ties and the all-zero-rate case resolve to the
// lowest index. Hot-loop form without the metric vector.
inline int pf_select_index(std::span<const double> rates, std::span<const double> ewma) {
  if (rates.empty() || rates.size() != ewma.size())
    throw std::invalid_argument("pf_select: rates and ewma must be nonempty and equal length");
  int best = 0;
  double best_metric = rates[0] / ewma[0];
  for (std::size_t k = 1; k < rates.size(); ++k) {
    const double m = rates[k] / ewma[k];
    if (m > best_metric) {
      best_metric = m;
      best = static_cast<int>(k);
    }
  }
  return best;
}

inline ScheduleDecision pf_select(std::span<const double> rates, const SchedulerState& state) {
  ScheduleDecision d;
  d.selected_ue = pf_select_index(rates, state.ewma);
  d.metrics.reserve(rates.size());
  for (std::size_t k = 0; k < rates.size(); ++k) d.metrics.push_back(rates[k] / state.ewma[k]);
  return d;
}

// Applies the EWMA recursion for one slot and records the selection.
// Every user's average decays; only the selected user's gains its current
// rate. A retransmission slot passes through unchanged: the retransmitting
// user plays the role of k*.
inline void ewma_update(SchedulerState& state, const ScheduleDecision& decision,
                        std::span<const double> rates) {
  if (rates.size() != state.ewma.size())
    throw std::invalid_argument("ewma_update: rate vector length mismatch");
  if (decision.selected_ue < 0 || decision.selected_ue >= static_cast<int>(state.ewma.size()))
    throw std::invalid_argument("ewma_update: selected user out of range");
  const double keep = 1.0 - 1.0 / state.tc_slots;
  const double gain = 1.0 / state.tc_slots;
  for (std::size_t k = 0; k < state.ewma.size(); ++k) {
    state.ewma[k] *= keep;
    if (static_cast<int>(k) == decision.selected_ue) state.ewma[k] += gain * rates[k];
  }
  ++state.sched_counts[static_cast<std::size_t>(decision.selected_ue)];
  ++state.slot;
}

// Decay-only EWMA step for slots that carry no downlink data (nobody is
// selected, time still passes).
inline void ewma_decay(SchedulerState& state) {
  const double keep = 1.0 - 1.0 / state.tc_slots;
  for (double& t : state.ewma) t *= keep;
  ++state.slot;
}

// Round-robin baseline: fixed cyclic order.
inline int rr_select(std::int64_t slot, int n_ues) {
  if (n_ues <= 0) throw std::invalid_argument("rr_select: need at least one user");
  if (slot < 0) throw std::invalid_argument("rr_select: negative slot");
  return static_cast<int>(slot % n_ues);
}

// Fraction of selections per user over all counted slots.
inline std::vector<double> empirical_frequencies(const SchedulerState& state) {
  std::int64_t total = 0;
  for (std::int64_t c : state.sched_counts) total += c;
  if (total <= 0)
    throw std::invalid_argument("empirical_frequencies: no scheduling decisions recorded");
  std::vector<double> f;
  f.reserve(state.sched_counts.size());
  for (std::int64_t c : state.sched_counts)
    f.push_back(static_cast<double>(c) / static_cast<double>(total));
  return f;
}

}  // namespace risim
