// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "risim/csv.hpp"
#include "risim/sim.hpp"

// Canned parameter sweeps built on run_trials: scheduler comparison over
// the fairness horizon, switching/fairness interval grid, and the two-user
// placement heatmap, each with a CSV writer. All cells of a sweep reuse the
// same per-trial seeds, so cross-cell comparisons are paired.

namespace risim {

struct CellStats {
  std::vector<double> per_trial;
  double mean = 0.0;
  double ci95_half = 0.0;  // normal-approximation half width
};

inline CellStats summarize(std::vector<double> xs) {
  CellStats s;
  s.per_trial = std::move(xs);
  if (s.per_trial.empty()) return s;
  const double n = static_cast<double>(s.per_trial.size());
  double acc = 0.0;
  for (double x : s.per_trial) acc += x;
  s.mean = acc / n;
  if (s.per_trial.size() > 1) {
    double ss = 0.0;
    for (double x : s.per_trial) ss += (x - s.mean) * (x - s.mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    s.ci95_half = 1.96 * sd / std::sqrt(n);
  }
  return s;
}

inline std::vector<double> extract_system_rate(const std::vector<RunSummary>& runs) {
  std::vector<double> xs;
  xs.reserve(runs.size());
  for (const RunSummary& r : runs) xs.push_back(r.mean_system_rate);
  return xs;
}

inline std::vector<double> extract_mbps(const std::vector<RunSummary>& runs) {
  std::vector<double> xs;
  xs.reserve(runs.size());
  for (const RunSummary& r : runs) xs.push_back(r.throughput_mbps);
  return xs;
}

inline std::vector<double> extract_genie_target(const std::vector<RunSummary>& runs) {
  std::vector<double> xs;
  xs.reserve(runs.size());
  for (const RunSummary& r : runs) xs.push_back(r.genie_system);
  return xs;
}

// ---------------------------------------------------------------------------
// Scheduler comparison sweep: mean served rate against the fairness horizon
// for the opportunistic scheduler at several switching intervals, with
// round-robin, the aligned-per-slot upper bound, and a surface-off baseline.

struct SchedulerSweepRow {
  std::string scheduler;
  std::int64_t ts_slots = 0;
  std::int64_t tc_slots = 0;
  std::int64_t n_slots = 0;
  int n_trials = 0;
  double mean_rate = 0.0;
  double ci95_half = 0.0;
  double mean_target = 0.0;  // aligned-per-slot bound on the same scenes
};

inline std::int64_t sweep_slot_budget(std::int64_t tc_slots, std::int64_t ts_slots) {
  const std::int64_t floor_slots = 20000;
  std::int64_t n = 20 * tc_slots;
  if (ts_slots > 0 && 10 * ts_slots > n) n = 10 * ts_slots;
  return n < floor_slots ? floor_slots : n;
}

inline std::vector<SchedulerSweepRow> scenario_scheduler_sweep(const SimConfig& base) {
  std::vector<SchedulerSweepRow> rows;
  auto push = [&rows](const SimConfig& cfg, const char* name, std::int64_t ts, std::int64_t tc) {
    const std::vector<RunSummary> runs = run_trials(cfg);
    const CellStats stats = summarize(extract_system_rate(runs));
    const CellStats target = summarize(extract_genie_target(runs));
    SchedulerSweepRow row;
    row.scheduler = name;
    row.ts_slots = ts;
    row.tc_slots = tc;
    row.n_slots = cfg.n_slots;
    row.n_trials = cfg.n_trials;
    row.mean_rate = stats.mean;
    row.ci95_half = stats.ci95_half;
    row.mean_target = target.mean;
    rows.push_back(row);
  };

  for (std::int64_t ts : base.ts_slots_list) {
    for (std::int64_t tc : base.tc_slots_list) {
      SimConfig cfg = base;
      cfg.scheduler = SchedulerKind::kPf;
      cfg.ts_slots = ts;
      cfg.tc_slots = static_cast<double>(tc);
      cfg.n_slots = sweep_slot_budget(tc, ts);
      push(cfg, "pf", ts, tc);
    }
    SimConfig cfg = base;
    cfg.scheduler = SchedulerKind::kRr;
    cfg.ts_slots = ts;
    cfg.n_slots = sweep_slot_budget(5000, ts);
    push(cfg, "rr", ts, static_cast<std::int64_t>(base.tc_slots));
  }
  {
    SimConfig cfg = base;
    cfg.scheduler = SchedulerKind::kGenie;
    cfg.n_slots = 100000;
    push(cfg, "genie", 0, 0);
  }
  for (std::int64_t tc : base.tc_slots_list) {
    SimConfig cfg = base;
    cfg.scheduler = SchedulerKind::kNoRis;
    cfg.tc_slots = static_cast<double>(tc);
    cfg.n_slots = sweep_slot_budget(tc, 0);
    push(cfg, "no-ris", 0, tc);
  }
  return rows;
}

inline void write_scheduler_sweep_csv(const std::string& path,
                                      const std::vector<SchedulerSweepRow>& rows,
                                      const SimConfig& base) {
  CsvWriter csv(path);
  csv.row({"scheduler", "ts_slots", "tc_slots", "n_slots", "n_trials", "mean_rate_bps_hz",
           "ci95_half", "aligned_bound_bps_hz"});
  for (const SchedulerSweepRow& r : rows)
    csv.row({r.scheduler, std::to_string(r.ts_slots), std::to_string(r.tc_slots),
             std::to_string(r.n_slots), std::to_string(r.n_trials), format_number(r.mean_rate),
             format_number(r.ci95_half), format_number(r.mean_target)});
  write_metadata(path, base, {{"sweep", "scheduler"}});
}

// ---------------------------------------------------------------------------
// Two-user desk scenario (link-adaptation mode): base station and surface
// about a metre apart, users on an arc in front of the surface, a two-beam
// configured codebook, and a diffuse residual under the beams.

inline SimConfig desk_base_config(const SimConfig& base) {
  SimConfig cfg = base;
  cfg.mode = SimMode::kNr;
  cfg.scheduler = SchedulerKind::kPf;
  cfg.bs_position = {-1.2, 0.0};
  cfg.ris_position = {0.0, 0.0};
  cfg.ris_nx = 32;
  cfg.ris_ny = 32;
  cfg.budget.tx_snr_db = 30.0;
  cfg.rsrp_ref_dbm = -90.0;
  cfg.beam_angles_deg = {30.0, 60.0};
  cfg.n_states = 2;
  cfg.floor_mode = FloorMode::kAdditive;
  cfg.diffuse_floor_db = -20.0;
  return cfg;
}

inline void place_desk_ues(SimConfig& cfg, const std::vector<double>& angles_deg,
                           double distance_m) {
  cfg.ue_positions.clear();
  for (double deg : angles_deg) {
    const double rad = deg * std::numbers::pi / 180.0;
    cfg.ue_positions.push_back({distance_m * std::cos(rad), distance_m * std::sin(rad)});
  }
  cfg.ue_count = static_cast<int>(angles_deg.size());
}

// Switching-interval / fairness-horizon grid on the desk scenario.
struct IntervalGridRow {
  double tc_seconds = 0.0;
  double ts_seconds = 0.0;
  std::int64_t tc_slots = 0;
  std::int64_t ts_slots = 0;
  std::int64_t n_slots = 0;
  int n_trials = 0;
  double mean_mbps = 0.0;
  double ci95_half = 0.0;
};

inline std::int64_t seconds_to_slots(double seconds, double slot_ms) {
  return static_cast<std::int64_t>(std::llround(seconds * 1000.0 / slot_ms));
}

inline std::vector<IntervalGridRow> scenario_interval_grid(const SimConfig& base) {
  SimConfig desk = desk_base_config(base);
  place_desk_ues(desk, {30.0, 60.0}, 1.52);
  std::vector<IntervalGridRow> rows;
  for (double tc_s : base.tc_seconds_list) {
    for (double ts_s : base.ts_seconds_list) {
      SimConfig cfg = desk;
      cfg.tc_slots = static_cast<double>(seconds_to_slots(tc_s, cfg.slot_duration_ms));
      cfg.ts_slots = seconds_to_slots(ts_s, cfg.slot_duration_ms);
      std::int64_t n = sweep_slot_budget(static_cast<std::int64_t>(cfg.tc_slots), cfg.ts_slots);
      if (n < 100000) n = 100000;
      cfg.n_slots = n;
      const std::vector<RunSummary> runs = run_trials(cfg);
      const CellStats stats = summarize(extract_mbps(runs));
      IntervalGridRow row;
      row.tc_seconds = tc_s;
      row.ts_seconds = ts_s;
      row.tc_slots = static_cast<std::int64_t>(cfg.tc_slots);
      row.ts_slots = cfg.ts_slots;
      row.n_slots = cfg.n_slots;
      row.n_trials = cfg.n_trials;
      row.mean_mbps = stats.mean;
      row.ci95_half = stats.ci95_half;
      rows.push_back(row);
    }
  }
  return rows;
}

inline void write_interval_grid_csv(const std::string& path,
                                    const std::vector<IntervalGridRow>& rows,
                                    const SimConfig& base) {
  CsvWriter csv(path);
  csv.row({"tc_seconds", "ts_seconds", "tc_slots", "ts_slots", "n_slots", "n_trials",
           "mean_mbps", "ci95_half"});
  for (const IntervalGridRow& r : rows)
    csv.row({format_number(r.tc_seconds), format_number(r.ts_seconds), std::to_string(r.tc_slots),
             std::to_string(r.ts_slots), std::to_string(r.n_slots), std::to_string(r.n_trials),
             format_number(r.mean_mbps), format_number(r.ci95_half)});
  write_metadata(path, base, {{"sweep", "interval-grid"}});
}

// ---------------------------------------------------------------------------
// Placement heatmap: per-user throughput by angle and distance, surface
// configured vs switched off, averaged over the paired-user configurations.

struct HeatmapRow {
  double angle_deg = 0.0;
  double distance_m = 0.0;
  bool ris_on = true;
  int n_samples = 0;
  double mean_mbps = 0.0;
  double ci95_half = 0.0;
};

struct HeatmapResult {
  std::vector<double> angles;       // distinct cell angles, in encounter order
  std::vector<double> distances;
  std::vector<HeatmapRow> rows;
  // samples[angle][distance][on=1/off=0]: config-major, then trial. The
  // same index in the on and off vectors refers to the same config and
  // trial, so differences are paired.
  std::vector<std::vector<std::array<std::vector<double>, 2>>> samples;
};

inline HeatmapResult scenario_heatmap(const SimConfig& base) {
  HeatmapResult out;
  auto angle_cell = [&out](double deg) {
    for (std::size_t i = 0; i < out.angles.size(); ++i)
      if (out.angles[i] == deg) return i;
    out.angles.push_back(deg);
    return out.angles.size() - 1;
  };
  for (double deg : base.heatmap_ue1_angles_deg) angle_cell(deg);
  for (double deg : base.heatmap_ue2_angles_deg) angle_cell(deg);
  out.distances = base.heatmap_distances_m;
  out.samples.assign(out.angles.size(),
                     std::vector<std::array<std::vector<double>, 2>>(out.distances.size()));

  const SimConfig desk = desk_base_config(base);
  for (std::size_t di = 0; di < out.distances.size(); ++di) {
    for (double a1 : base.heatmap_ue1_angles_deg) {
      for (double a2 : base.heatmap_ue2_angles_deg) {
        for (int on = 1; on >= 0; --on) {
          SimConfig cfg = desk;
          place_desk_ues(cfg, {a1, a2}, out.distances[di]);
          cfg.floor_mode = on ? FloorMode::kAdditive : FloorMode::kReplace;
          const std::vector<RunSummary> runs = run_trials(cfg);
          const std::size_t c1 = angle_cell(a1);
          const std::size_t c2 = angle_cell(a2);
          for (const RunSummary& r : runs) {
            out.samples[c1][di][static_cast<std::size_t>(on)].push_back(r.per_ue_mbps[0]);
            out.samples[c2][di][static_cast<std::size_t>(on)].push_back(r.per_ue_mbps[1]);
          }
        }
      }
    }
  }

  for (std::size_t ai = 0; ai < out.angles.size(); ++ai) {
    for (std::size_t di = 0; di < out.distances.size(); ++di) {
      for (int on = 1; on >= 0; --on) {
        const CellStats stats = summarize(out.samples[ai][di][static_cast<std::size_t>(on)]);
        HeatmapRow row;
        row.angle_deg = out.angles[ai];
        row.distance_m = out.distances[di];
        row.ris_on = on != 0;
        row.n_samples = static_cast<int>(stats.per_trial.size());
        row.mean_mbps = stats.mean;
        row.ci95_half = stats.ci95_half;
        out.rows.push_back(row);
      }
    }
  }
  return out;
}

inline void write_heatmap_csv(const std::string& path, const HeatmapResult& result,
                              const SimConfig& base) {
  CsvWriter csv(path);
  csv.row({"angle_deg", "distance_m", "ris", "n_samples", "mean_mbps", "ci95_half"});
  for (const HeatmapRow& r : result.rows)
    csv.row({format_number(r.angle_deg), format_number(r.distance_m),
             r.ris_on ? std::string("on") : std::string("off"), std::to_string(r.n_samples),
             format_number(r.mean_mbps), format_number(r.ci95_half)});
  write_metadata(path, base, {{"sweep", "heatmap"}});
}

// ---------------------------------------------------------------------------
// Fairness-horizon sizing report from the concentration bound.

struct BoundRow {
  BoundParams params;
  std::int64_t required_tc_slots = 0;
  double gap_bound = 0.0;      // on 2K * max deviation, same scale as rates
  double confidence = 0.0;     // at least this probability
};

inline BoundRow bound_report(const BoundParams& params) {
  BoundRow row;
  row.params = params;
  row.required_tc_slots = required_tc_slots(params);
  row.gap_bound = 2.0 * static_cast<double>(params.n_ues) * (params.eps1 + params.eps2);
  row.confidence = 1.0 - (params.eta1 + params.eta2);
  return row;
}

inline void write_bound_csv(const std::string& path, const std::vector<BoundRow>& rows,
                            const SimConfig& base) {
  CsvWriter csv(path);
  csv.row({"eps1", "eps2", "eta1", "eta2", "n_states", "n_ues", "ts_slots",
           "required_tc_slots", "gap_bound", "confidence"});
  for (const BoundRow& r : rows)
    csv.row({format_number(r.params.eps1), format_number(r.params.eps2),
             format_number(r.params.eta1), format_number(r.params.eta2),
             std::to_string(r.params.n_states), std::to_string(r.params.n_ues),
             std::to_string(r.params.ts_slots), std::to_string(r.required_tc_slots),
             format_number(r.gap_bound), format_number(r.confidence)});
  write_metadata(path, base, {{"sweep", "bound"}});
}

}  // namespace risim
