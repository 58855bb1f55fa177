// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "risim/analysis.hpp"
#include "risim/channel.hpp"
#include "risim/config.hpp"
#include "risim/link_adaptation.hpp"
#include "risim/ris.hpp"
#include "risim/rng.hpp"
#include "risim/scheduler.hpp"

// Slot-level Monte Carlo driver. A Scene freezes everything that is fixed
// for one run (placements, fading, path gains, codebook, beam-gain table);
// run_trajectory then plays the slot loop for one seed, and run_trials
// fans trajectories out over worker threads. Results are keyed by trial
// index, never by completion order, so the output is identical for any
// worker count.

namespace risim {

// RNG stream tags (mixed with the base seed and trial index).
inline constexpr std::uint64_t kStreamScene = 0xA1;
inline constexpr std::uint64_t kStreamTrajectory = 0xB2;

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

struct Scene {
  ArrayGeometry geom;
  LinkBudget budget;
  std::vector<UePlacement> ues;
  std::vector<double> beta;        // cascaded large-scale gain per user
  RisCodebook codebook;
  SamplingPmf pmf;
  std::vector<int> assignment;     // codebook region per user
  std::vector<int> aligned_state;  // best codeword per user
  // Fading-independent SNR factor per (state, user):
  // tx_snr_linear * beta_k * effective beam gain.
  std::vector<std::vector<double>> snr_factor;
  // 10*log10(beta_k * effective beam gain), for RSRP / SNR in dB.
  std::vector<std::vector<double>> chan_db;
  std::vector<double> r_opt;   // best-codeword rate per user at scene fading
  std::vector<double> t_star;  // r_opt / K, the genie per-user target
  double genie_system = 0.0;   // sum of t_star

  int n_ues() const { return static_cast<int>(ues.size()); }
  int n_states() const { return codebook.size(); }
};

inline Scene build_scene(const SimConfig& cfg, int trial) {
  {
    const auto errors = cfg.validate();
    if (!errors.empty()) throw std::invalid_argument("build_scene: invalid config: " + errors.front());
  }
  Scene s;
  s.geom = ArrayGeometry{cfg.ris_nx, cfg.ris_ny, cfg.ris_spacing};
  s.budget = cfg.budget;

  Rng rng = Rng::derive(cfg.seed, kStreamScene,
                        cfg.redraw_placement_per_trial ? static_cast<std::uint64_t>(trial) : 0);

  const int k_ues = cfg.effective_ue_count();
  std::vector<Vec2> positions;
  if (!cfg.ue_positions.empty()) {
    positions = cfg.ue_positions;
  } else {
    positions.reserve(static_cast<std::size_t>(k_ues));
    for (int k = 0; k < k_ues; ++k) {
      const double x = rng.uniform(cfg.ue_box[0], cfg.ue_box[1]);
      const double y = rng.uniform(cfg.ue_box[2], cfg.ue_box[3]);
      positions.push_back({x, y});
    }
  }

  const SteeringDirection bs_side = direction_between(cfg.ris_position, cfg.bs_position);
  std::vector<std::vector<std::complex<double>>> responses;
  std::vector<SteeringDirection> cascaded;
  for (int k = 0; k < k_ues; ++k) {
    UePlacement ue;
    ue.position = positions[static_cast<std::size_t>(k)];
    ue.cascaded = cascaded_direction(bs_side, direction_between(cfg.ris_position, ue.position));
    ue.fading = rng.cnormal();
    cascaded.push_back(ue.cascaded);
    responses.push_back(steering_vector(s.geom, ue.cascaded));
    s.beta.push_back(cascaded_path_gain(cfg.bs_position, cfg.ris_position, ue.position, cfg.budget));
    s.ues.push_back(ue);
  }

  if (!cfg.beam_angles_deg.empty()) {
    // Explicit codebook: configured departure beams composed with the
    // base-station side, sampled uniformly.
    for (double deg : cfg.beam_angles_deg) {
      const SteeringDirection dir =
          cascaded_direction(bs_side, SteeringDirection::from_angles(deg * std::numbers::pi / 180.0));
      s.codebook.centroids.push_back(dir);
      s.codebook.phase_profiles.push_back(steering_vector(s.geom, dir));
    }
    s.pmf.probs.assign(static_cast<std::size_t>(s.codebook.size()),
                       1.0 / static_cast<double>(s.codebook.size()));
    for (int k = 0; k < k_ues; ++k) {
      int best = 0;
      double best_d = detail::sq_dist(cascaded[static_cast<std::size_t>(k)], s.codebook.centroids[0]);
      for (int c = 1; c < s.codebook.size(); ++c) {
        const double d = detail::sq_dist(cascaded[static_cast<std::size_t>(k)],
                                         s.codebook.centroids[static_cast<std::size_t>(c)]);
        if (d < best_d) { best_d = d; best = c; }
      }
      s.assignment.push_back(best);
    }
  } else {
    TileResult tiled = tile_and_build(cascaded, cfg.n_states, s.geom);
    s.codebook = std::move(tiled.codebook);
    s.pmf = std::move(tiled.pmf);
    s.assignment = std::move(tiled.assignment);
  }

  const FloorMode floor_mode =
      cfg.scheduler == SchedulerKind::kNoRis ? FloorMode::kReplace : cfg.floor_mode;
  const double n_elems = static_cast<double>(s.geom.size());
  const double floor_gain =
      n_elems * n_elems * std::pow(10.0, cfg.diffuse_floor_db / 10.0);
  const double snr_lin = cfg.budget.tx_snr_linear();

  const int L = s.codebook.size();
  s.snr_factor.assign(static_cast<std::size_t>(L), std::vector<double>(static_cast<std::size_t>(k_ues), 0.0));
  s.chan_db = s.snr_factor;
  for (int l = 0; l < L; ++l) {
    for (int k = 0; k < k_ues; ++k) {
      const double beam = std::norm(inner_product_conj(s.codebook.phase_profiles[static_cast<std::size_t>(l)],
                                                       responses[static_cast<std::size_t>(k)]));
      double eff = beam;
      if (floor_mode == FloorMode::kReplace) eff = floor_gain;
      else if (floor_mode == FloorMode::kAdditive) eff = beam + floor_gain;
      const double bg = s.beta[static_cast<std::size_t>(k)] * eff;
      s.snr_factor[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)] = snr_lin * bg;
      s.chan_db[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)] = 10.0 * std::log10(bg);
    }
  }

  for (int k = 0; k < k_ues; ++k) {
    int best = 0;
    double best_x = s.snr_factor[0][static_cast<std::size_t>(k)];
    for (int l = 1; l < L; ++l) {
      const double x = s.snr_factor[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
      if (x > best_x) { best_x = x; best = l; }
    }
    s.aligned_state.push_back(best);
    const double a2 = std::norm(s.ues[static_cast<std::size_t>(k)].fading);
    const double r = std::log2(1.0 + best_x * a2);
    s.r_opt.push_back(r);
    s.t_star.push_back(r / static_cast<double>(k_ues));
    s.genie_system += r / static_cast<double>(k_ues);
  }
  return s;
}

struct TraceRecord {
  std::int64_t slot = 0;
  int ris_state = 0;
  int scheduled_ue = -1;  // -1 on slots carrying no downlink data
  bool is_retransmission = false;
  int mcs = -1;
  double bler = 0.0;
  double rsrp_dbm = 0.0;
  std::int64_t delivered_bits = 0;
  std::vector<double> rates;
  std::vector<double> ewma;
};

using TraceSink = std::function<void(const TraceRecord&)>;

struct RunSummary {
  std::int64_t n_slots = 0;
  std::int64_t n_data_slots = 0;
  // Mean spectral efficiency of the served user per data slot (theory
  // rates, or delivered bits over allocated resource elements in nr mode).
  double mean_system_rate = 0.0;
  double throughput_mbps = 0.0;            // nr only: delivered, overhead-derated
  std::vector<double> per_ue_rate;         // per-user share of mean_system_rate
  std::vector<double> per_ue_mbps;         // nr only
  std::vector<double> ewma_final;
  std::vector<double> p_hat;               // empirical switching-state draw frequencies
  std::vector<double> q_hat;               // empirical scheduling frequencies
  double tv_p = 0.0;                       // TV(p_hat, design pmf)
  double tv_q = 0.0;                       // TV(q_hat, uniform)
  double optimality_gap = 0.0;             // ||ewma - t_star||_inf / ||t_star||_inf
  std::vector<double> t_star;
  double genie_system = 0.0;
  std::vector<double> aligned_sched_frac;  // per user, over data slots
  std::vector<double> misaligned_sched_frac;
  std::vector<double> region_time_frac;    // data-slot share per codebook region
  std::int64_t harq_retx = 0;
  std::int64_t harq_discards = 0;
  double mean_scheduled_mcs = 0.0;         // nr only
  std::int64_t delivered_bits_total = 0;   // nr only
};

inline RunSummary run_trajectory(const SimConfig& cfg, const Scene& scene, int trial,
                                 const TraceSink* sink = nullptr) {
  const bool nr = cfg.mode == SimMode::kNr;
  const bool genie = cfg.scheduler == SchedulerKind::kGenie;
  const int K = scene.n_ues();
  const int L = scene.n_states();

  Rng rng = Rng::derive(cfg.seed, kStreamTrajectory, static_cast<std::uint64_t>(trial));
  SchedulerState sched = SchedulerState::make(K, cfg.tc_slots, cfg.ewma_init);
  SwitchingSchedule sw{cfg.ts_slots, 0, -1};

  std::vector<double> alpha2(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) alpha2[static_cast<std::size_t>(k)] = std::norm(scene.ues[static_cast<std::size_t>(k)].fading);

  // Theory-mode rate table (recomputed per block under fading refresh).
  std::vector<std::vector<double>> rate_table;
  auto rebuild_rates = [&]() {
    rate_table.assign(static_cast<std::size_t>(L), std::vector<double>(static_cast<std::size_t>(K), 0.0));
    for (int l = 0; l < L; ++l)
      for (int k = 0; k < K; ++k)
        rate_table[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)] =
            std::log2(1.0 + scene.snr_factor[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)] *
                                alpha2[static_cast<std::size_t>(k)]);
  };
  if (!nr) rebuild_rates();

  const McsTable mcs_table = McsTable::qam64();
  struct UeLink {
    int mcs = kMcsMin;
    BlerWindow window{200};
    HarqProcess harq;
    double last_rsrp = -200.0;
  };
  std::vector<UeLink> links;
  if (nr) {
    links.assign(static_cast<std::size_t>(K), UeLink{kMcsMin, BlerWindow{cfg.bler_window_slots}, {}, -200.0});
  }
  int pending_ue = -1;

  std::vector<double> genie_rates;
  if (genie) genie_rates = scene.r_opt;

  // Accumulators.
  KahanSum sys_rate;
  std::vector<KahanSum> ue_rate(static_cast<std::size_t>(K));
  std::vector<std::int64_t> draw_counts(static_cast<std::size_t>(L), 0);
  std::int64_t n_draws = 0;
  std::vector<std::int64_t> aligned_counts(static_cast<std::size_t>(K), 0);
  std::vector<std::int64_t> misaligned_counts(static_cast<std::size_t>(K), 0);
  std::vector<std::int64_t> region_counts(static_cast<std::size_t>(L), 0);
  std::vector<std::int64_t> ue_bits(static_cast<std::size_t>(K), 0);
  std::int64_t data_slots = 0;
  std::int64_t delivered_total = 0;
  std::int64_t harq_retx = 0, harq_discards = 0;
  std::int64_t mcs_sum = 0, mcs_count = 0;

  std::vector<double> nr_rates(static_cast<std::size_t>(K), 0.0);
  TraceRecord rec;

  for (std::int64_t slot = 0; slot < cfg.n_slots; ++slot) {
    bool redraw = false;
    if (!genie) {
      redraw = sw.advance(slot, scene.pmf, rng);
      if (redraw) {
        ++draw_counts[static_cast<std::size_t>(sw.current_state)];
        ++n_draws;
        if (cfg.fading_refresh == FadingRefresh::kPerBlock) {
          for (int k = 0; k < K; ++k) alpha2[static_cast<std::size_t>(k)] = std::norm(rng.cnormal());
          if (!nr) rebuild_rates();
        }
        if (nr && slot > 0) {
          // The configuration changed under the link adaptation loop; the
          // controller re-anchors each user at the nominal index for its
          // most recent (possibly stale) report.
          for (UeLink& link : links)
            link.mcs = clamp_mcs(nominal_mcs_from_rsrp(link.last_rsrp), cfg.mcs_min, cfg.mcs_max);
        }
      }
    }

    if (nr) {
      if (slot % cfg.rsrp_period_slots == 0) {
        for (int k = 0; k < K; ++k) {
          UeLink& link = links[static_cast<std::size_t>(k)];
          const double rsrp = cfg.rsrp_ref_dbm +
                              scene.chan_db[static_cast<std::size_t>(sw.current_state)][static_cast<std::size_t>(k)] +
                              10.0 * std::log10(alpha2[static_cast<std::size_t>(k)]);
          link.last_rsrp = rsrp;
          const int nominal = nominal_mcs_from_rsrp(rsrp);
          link.mcs = slot == 0 ? clamp_mcs(nominal, cfg.mcs_min, cfg.mcs_max)
                               : fast_adapt(link.mcs, nominal, cfg.mcs_min, cfg.mcs_max);
        }
      }
      if (slot > 0 && slot % cfg.bler_window_slots == 0) {
        for (UeLink& link : links) {
          link.window.evict(slot);
          if (!link.window.empty())
            link.mcs = adapt_mcs_bler(link.mcs, link.window.estimate(), cfg.mcs_min, cfg.mcs_max);
        }
      }
    }

    const bool data_slot = !nr || (slot % cfg.tdd_period_slots) < cfg.tdd_dl_slots;
    if (!data_slot) {
      ewma_decay(sched);
      if (sink) {
        rec = TraceRecord{};
        rec.slot = slot;
        rec.ris_state = sw.current_state;
        rec.ewma = sched.ewma;
        (*sink)(rec);
      }
      continue;
    }

    // Rates driving the scheduling metric.
    const std::vector<double>* rates = nullptr;
    if (genie) {
      rates = &genie_rates;
    } else if (nr) {
      for (int k = 0; k < K; ++k)
        nr_rates[static_cast<std::size_t>(k)] = mcs_table.at(links[static_cast<std::size_t>(k)].mcs).spectral_efficiency;
      rates = &nr_rates;
    } else {
      rates = &rate_table[static_cast<std::size_t>(sw.current_state)];
    }

    int selected;
    bool is_retx = false;
    if (nr && pending_ue >= 0) {
      selected = pending_ue;  // retransmission preempts the scheduling rule
      is_retx = true;
    } else {
      switch (cfg.scheduler) {
        case SchedulerKind::kRr:
        case SchedulerKind::kGenie:
          selected = rr_select(data_slots, K);
          break;
        default:
          selected = pf_select_index(*rates, sched.ewma);
      }
    }

    const int state_for_ue = genie ? scene.aligned_state[static_cast<std::size_t>(selected)] : sw.current_state;
    double served_rate = (*rates)[static_cast<std::size_t>(selected)];

    int tb_mcs = -1;
    double tb_bler = 0.0;
    std::int64_t delivered = 0;
    if (nr) {
      UeLink& link = links[static_cast<std::size_t>(selected)];
      tb_mcs = is_retx ? link.harq.mcs : link.mcs;
      const double snr_db =
          cfg.budget.tx_snr_db +
          scene.chan_db[static_cast<std::size_t>(state_for_ue)][static_cast<std::size_t>(selected)] +
          10.0 * std::log10(alpha2[static_cast<std::size_t>(selected)]);
      const McsEntry& entry = mcs_table.at(tb_mcs);
      tb_bler = bler_probability(snr_db, entry);
      const bool failed = rng.uniform() < tb_bler;
      link.window.record(slot, failed);
      const HarqAction action = harq_step(link.harq, tb_mcs, !failed);
      switch (action) {
        case HarqAction::kDelivered:
          delivered = slot_throughput_bits(entry, cfg.n_prb, cfg.n_symbols);
          pending_ue = -1;
          break;
        case HarqAction::kRetransmit:
          ++harq_retx;
          pending_ue = selected;
          break;
        case HarqAction::kDiscarded:
          ++harq_discards;
          pending_ue = -1;
          break;
      }
      delivered_total += delivered;
      ue_bits[static_cast<std::size_t>(selected)] += delivered;
      mcs_sum += tb_mcs;
      ++mcs_count;
      served_rate = static_cast<double>(delivered) /
                    (static_cast<double>(cfg.n_prb) * 12.0 * static_cast<double>(cfg.n_symbols));
    }

    ScheduleDecision decision;
    decision.selected_ue = selected;
    decision.is_retransmission = is_retx;
    ewma_update(sched, decision, *rates);

    sys_rate.add(served_rate);
    ue_rate[static_cast<std::size_t>(selected)].add(served_rate);
    ++region_counts[static_cast<std::size_t>(scene.assignment[static_cast<std::size_t>(selected)])];
    if (state_for_ue == scene.aligned_state[static_cast<std::size_t>(selected)])
      ++aligned_counts[static_cast<std::size_t>(selected)];
    else
      ++misaligned_counts[static_cast<std::size_t>(selected)];
    ++data_slots;

    if (sink) {
      rec = TraceRecord{};
      rec.slot = slot;
      rec.ris_state = sw.current_state;
      rec.scheduled_ue = selected;
      rec.is_retransmission = is_retx;
      rec.mcs = tb_mcs;
      rec.bler = tb_bler;
      rec.rsrp_dbm = nr ? links[static_cast<std::size_t>(selected)].last_rsrp : 0.0;
      rec.delivered_bits = delivered;
      rec.rates = *rates;
      rec.ewma = sched.ewma;
      (*sink)(rec);
    }
  }

  RunSummary out;
  out.n_slots = cfg.n_slots;
  out.n_data_slots = data_slots;
  out.t_star = scene.t_star;
  out.genie_system = scene.genie_system;
  out.ewma_final = sched.ewma;
  if (data_slots > 0) {
    out.mean_system_rate = sys_rate.sum / static_cast<double>(data_slots);
    out.per_ue_rate.reserve(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k)
      out.per_ue_rate.push_back(ue_rate[static_cast<std::size_t>(k)].sum / static_cast<double>(data_slots));
    out.q_hat = empirical_frequencies(sched);
    const std::vector<double> uniform(static_cast<std::size_t>(K), 1.0 / static_cast<double>(K));
    out.tv_q = tv_distance(out.q_hat, uniform);
    for (std::int64_t c : aligned_counts)
      out.aligned_sched_frac.push_back(static_cast<double>(c) / static_cast<double>(data_slots));
    for (std::int64_t c : misaligned_counts)
      out.misaligned_sched_frac.push_back(static_cast<double>(c) / static_cast<double>(data_slots));
    for (std::int64_t c : region_counts)
      out.region_time_frac.push_back(static_cast<double>(c) / static_cast<double>(data_slots));
  }
  if (n_draws > 0) {
    out.p_hat.reserve(static_cast<std::size_t>(L));
    for (std::int64_t c : draw_counts)
      out.p_hat.push_back(static_cast<double>(c) / static_cast<double>(n_draws));
    out.tv_p = tv_distance(out.p_hat, scene.pmf.probs);
  }
  if (!nr && !out.ewma_final.empty()) {
    bool target_nonzero = false;
    for (double t : scene.t_star) target_nonzero = target_nonzero || t > 0.0;
    if (target_nonzero) out.optimality_gap = optimality_gap(out.ewma_final, scene.t_star);
  }
  if (nr) {
    const double sim_seconds =
        static_cast<double>(cfg.n_slots) * cfg.slot_duration_ms * 1e-3;
    out.delivered_bits_total = delivered_total;
    out.throughput_mbps =
        static_cast<double>(delivered_total) * (1.0 - cfg.dl_overhead) / sim_seconds / 1e6;
    for (int k = 0; k < K; ++k)
      out.per_ue_mbps.push_back(static_cast<double>(ue_bits[static_cast<std::size_t>(k)]) *
                                (1.0 - cfg.dl_overhead) / sim_seconds / 1e6);
    out.harq_retx = harq_retx;
    out.harq_discards = harq_discards;
    if (mcs_count > 0)
      out.mean_scheduled_mcs = static_cast<double>(mcs_sum) / static_cast<double>(mcs_count);
  }
  return out;
}

// Convenience: build the scene for this trial (shared placement when the
// config pins it) and run.
inline RunSummary run_single(const SimConfig& cfg, int trial, const TraceSink* sink = nullptr) {
  const Scene scene = build_scene(cfg, trial);
  return run_trajectory(cfg, scene, trial, sink);
}

// Runs n_trials independent trajectories across a worker pool. Trial i's
// result lands at index i regardless of scheduling, so any thread count
// produces the same vector.
inline std::vector<RunSummary> run_trials(const SimConfig& cfg) {
  const int n = cfg.n_trials;
  std::vector<RunSummary> results(static_cast<std::size_t>(n));
  const Scene* shared = nullptr;
  Scene shared_storage;
  if (!cfg.redraw_placement_per_trial) {
    shared_storage = build_scene(cfg, 0);
    shared = &shared_storage;
  }
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const unsigned workers =
      std::min<unsigned>(cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : hw,
                         static_cast<unsigned>(n));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i)
      results[static_cast<std::size_t>(i)] =
          shared ? run_trajectory(cfg, *shared, i) : run_single(cfg, i);
    return results;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
      results[static_cast<std::size_t>(i)] =
          shared ? run_trajectory(cfg, *shared, i) : run_single(cfg, i);
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  return results;
}

}  // namespace risim
