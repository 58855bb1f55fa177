// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "risim/channel.hpp"

// Scenario configuration: a plain-text key-value format with [section]
// headers, parsed into SimConfig with field-level error reporting.
//
//   # comment
//   [system]
//   mode = theory
//   n_slots = 200000
//   [geometry]
//   ue_box = 70 120 -20 20
//
// Multi-value keys take whitespace-separated numbers. Unknown sections or
// keys, malformed values, and out-of-range settings are all reported with
// the offending key so a bad file fails loudly rather than half-applying.

namespace risim {

enum class SimMode { kTheory, kNr };
enum class SchedulerKind { kPf, kRr, kGenie, kNoRis };

// How the diffuse reflection floor enters the beam gain:
//  kOff      - pure codeword gain |phi^H a|^2 (theory scenarios)
//  kReplace  - floor only, surface not configured (the no-RIS baseline)
//  kAdditive - codeword gain plus floor (configured surface, diffuse
//              residual kept; used by the coverage-map scenario)
enum class FloorMode { kOff, kReplace, kAdditive };

// Fading refresh policy: block-static (one draw per run) or redrawn at
// every switching block (used by the within-class fairness checks).
enum class FadingRefresh { kStatic, kPerBlock };

struct SimConfig {
  // [system]
  SimMode mode = SimMode::kTheory;
  SchedulerKind scheduler = SchedulerKind::kPf;
  std::int64_t n_slots = 200000;
  int n_trials = 1;
  std::uint64_t seed = 1;
  double slot_duration_ms = 0.5;
  int threads = 0;  // 0 = hardware concurrency
  bool redraw_placement_per_trial = true;
  FadingRefresh fading_refresh = FadingRefresh::kStatic;

  // [geometry]
  Vec2 bs_position{0.0, 0.0};
  Vec2 ris_position{60.0, 20.0};
  int ris_nx = 16;
  int ris_ny = 16;
  double ris_spacing = 0.25;
  int ue_count = 10;
  std::array<double, 4> ue_box{70.0, 120.0, -20.0, 20.0};  // xmin xmax ymin ymax
  std::vector<Vec2> ue_positions;  // optional, overrides the box draw

  // [budget]
  LinkBudget budget;

  // [ris]
  int n_states = 10;
  std::int64_t ts_slots = 1;                 // 0 = never switch
  std::vector<double> beam_angles_deg;       // optional explicit codebook
  double diffuse_floor_db = -20.0;           // relative to the aligned gain
  FloorMode floor_mode = FloorMode::kOff;

  // [scheduler]
  double tc_slots = 100000.0;
  double ewma_init = 1e-3;

  // [nr]
  int n_prb = 106;
  int n_symbols = 13;
  double dl_overhead = 0.14;
  int tdd_dl_slots = 6;
  int tdd_period_slots = 10;
  std::int64_t bler_window_slots = 200;   // 100 ms at 0.5 ms slots
  std::int64_t rsrp_period_slots = 160;   // 80 ms
  double rsrp_ref_dbm = -90.0;
  int mcs_min = 3;
  int mcs_max = 27;

  // [sweep] grids for the scenario subcommands
  std::vector<std::int64_t> ts_slots_list{1, 10, 100};
  std::vector<std::int64_t> tc_slots_list{100, 1000, 10000, 100000};
  std::vector<double> ts_seconds_list{1.0, 3.0, 5.0, 9.0, 15.0};
  std::vector<double> tc_seconds_list{0.1, 1.0, 10.0};

  // [heatmap] paired user angles (degrees at the surface) and shared radii
  std::vector<double> heatmap_ue1_angles_deg{15.0, 30.0};
  std::vector<double> heatmap_ue2_angles_deg{75.0, 60.0};
  std::vector<double> heatmap_distances_m{1.22, 1.52, 1.82};

  int effective_ue_count() const {
    return ue_positions.empty() ? ue_count : static_cast<int>(ue_positions.size());
  }

  // Field-level validation; returns one message per problem, empty if usable.
  std::vector<std::string> validate() const {
    std::vector<std::string> errors;
    auto bad = [&errors](const std::string& key, const std::string& why) {
      errors.push_back(key + ": " + why);
    };
    if (n_slots <= 0) bad("system.n_slots", "must be positive");
    if (n_trials <= 0) bad("system.n_trials", "must be positive");
    if (!(slot_duration_ms > 0.0)) bad("system.slot_duration_ms", "must be positive");
    if (threads < 0) bad("system.threads", "must be >= 0");
    if (ris_nx <= 0 || ris_ny <= 0) bad("geometry.ris_nx/ris_ny", "element counts must be positive");
    if (!(ris_spacing > 0.0)) bad("geometry.ris_spacing", "must be positive");
    if (ue_positions.empty()) {
      if (ue_count <= 0) bad("geometry.ue_count", "must be positive");
      if (!(ue_box[0] < ue_box[1]) || !(ue_box[2] < ue_box[3]))
        bad("geometry.ue_box", "expected xmin < xmax and ymin < ymax");
    }
    for (const Vec2& p : ue_positions)
      if (distance(p, ris_position) <= 0.0)
        bad("geometry.ue_positions", "user placed on top of the surface");
    if (distance(bs_position, ris_position) <= 0.0)
      bad("geometry.ris_position", "surface placed on top of the base station");
    if (!(budget.exp_bs_ris > 0.0) || !(budget.exp_ris_ue > 0.0) || !(budget.exp_bs_ue > 0.0))
      bad("budget.pl_exp_*", "path-loss exponents must be positive");
    if (n_states <= 0) bad("ris.n_states", "must be positive");
    if (ts_slots < 0) bad("ris.ts_slots", "must be >= 0 (0 = never switch)");
    if (!beam_angles_deg.empty() && static_cast<int>(beam_angles_deg.size()) != n_states)
      bad("ris.beam_angles_deg", "when given, must list exactly n_states angles");
    if (!(tc_slots >= 1.0)) bad("scheduler.tc_slots", "must be >= 1");
    if (!(ewma_init > 0.0)) bad("scheduler.ewma_init", "must be positive");
    if (mode == SimMode::kNr) {
      if (n_prb <= 0) bad("nr.n_prb", "must be positive");
      if (n_symbols <= 0 || n_symbols > 14) bad("nr.n_symbols", "must be in [1, 14]");
      if (!(dl_overhead >= 0.0 && dl_overhead < 1.0)) bad("nr.dl_overhead", "must be in [0, 1)");
      if (tdd_period_slots <= 0) bad("nr.tdd_period_slots", "must be positive");
      if (tdd_dl_slots < 0 || tdd_dl_slots > tdd_period_slots)
        bad("nr.tdd_dl_slots", "must be in [0, tdd_period_slots]");
      if (bler_window_slots <= 0) bad("nr.bler_window_slots", "must be positive");
      if (rsrp_period_slots <= 0) bad("nr.rsrp_period_slots", "must be positive");
      if (mcs_min < 0 || mcs_max > 28 || mcs_min > mcs_max)
        bad("nr.mcs_min/mcs_max", "need 0 <= mcs_min <= mcs_max <= 28");
      if (scheduler == SchedulerKind::kGenie)
        bad("system.scheduler", "genie baseline is defined for theory mode only");
    }
    return errors;
  }
};

namespace detail {

inline bool parse_bool(const std::string& v, bool& out) {
  if (v == "true" || v == "1" || v == "yes") { out = true; return true; }
  if (v == "false" || v == "0" || v == "no") { out = false; return true; }
  return false;
}

template <typename T>
bool parse_numbers(const std::string& v, std::vector<T>& out) {
  std::istringstream in(v);
  std::vector<T> tmp;
  T x;
  while (in >> x) tmp.push_back(x);
  if (!in.eof()) return false;
  if (tmp.empty()) return false;
  out = std::move(tmp);
  return true;
}

template <typename T>
bool parse_scalar(const std::string& v, T& out) {
  std::istringstream in(v);
  T x;
  if (!(in >> x)) return false;
  std::string rest;
  if (in >> rest) return false;
  out = x;
  return true;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

struct ConfigParse {
  SimConfig config;
  std::vector<std::string> errors;

  bool ok() const { return errors.empty(); }
};

// Parses the key-value scenario format on top of `base` (defaults or a
// previously-parsed config), collecting per-key diagnostics.
inline ConfigParse parse_config(std::istream& in, const SimConfig& base = SimConfig{}) {
  ConfigParse out;
  out.config = base;
  SimConfig& c = out.config;
  std::string section;
  std::string line;
  int lineno = 0;

  auto fail = [&out, &lineno](const std::string& key, const std::string& why) {
    out.errors.push_back("line " + std::to_string(lineno) + ", " + key + ": " + why);
  };

  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') { fail(t, "malformed section header"); continue; }
      section = detail::trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) { fail(t, "expected key = value"); continue; }
    const std::string key = detail::trim(std::string_view(t).substr(0, eq));
    const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;
    if (value.empty()) { fail(full, "empty value"); continue; }

    auto num = [&](auto& field) {
      if (!detail::parse_scalar(value, field)) fail(full, "expected a number, got '" + value + "'");
    };
    auto vec2 = [&](Vec2& field) {
      std::vector<double> xs;
      if (!detail::parse_numbers(value, xs) || xs.size() != 2)
        fail(full, "expected two numbers, got '" + value + "'");
      else
        field = {xs[0], xs[1]};
    };
    auto boolean = [&](bool& field) {
      if (!detail::parse_bool(value, field)) fail(full, "expected true/false, got '" + value + "'");
    };

    if (full == "system.mode") {
      if (value == "theory") c.mode = SimMode::kTheory;
      else if (value == "nr") c.mode = SimMode::kNr;
      else fail(full, "expected theory|nr, got '" + value + "'");
    } else if (full == "system.scheduler") {
      if (value == "pf") c.scheduler = SchedulerKind::kPf;
      else if (value == "rr") c.scheduler = SchedulerKind::kRr;
      else if (value == "genie") c.scheduler = SchedulerKind::kGenie;
      else if (value == "no-ris") c.scheduler = SchedulerKind::kNoRis;
      else fail(full, "expected pf|rr|genie|no-ris, got '" + value + "'");
    } else if (full == "system.n_slots") num(c.n_slots);
    else if (full == "system.n_trials") num(c.n_trials);
    else if (full == "system.seed") num(c.seed);
    else if (full == "system.slot_duration_ms") num(c.slot_duration_ms);
    else if (full == "system.threads") num(c.threads);
    else if (full == "system.redraw_placement_per_trial") boolean(c.redraw_placement_per_trial);
    else if (full == "system.fading_refresh") {
      if (value == "static") c.fading_refresh = FadingRefresh::kStatic;
      else if (value == "per-block") c.fading_refresh = FadingRefresh::kPerBlock;
      else fail(full, "expected static|per-block, got '" + value + "'");
    } else if (full == "geometry.bs_position") vec2(c.bs_position);
    else if (full == "geometry.ris_position") vec2(c.ris_position);
    else if (full == "geometry.ris_nx") num(c.ris_nx);
    else if (full == "geometry.ris_ny") num(c.ris_ny);
    else if (full == "geometry.ris_spacing") num(c.ris_spacing);
    else if (full == "geometry.ue_count") num(c.ue_count);
    else if (full == "geometry.ue_box") {
      std::vector<double> xs;
      if (!detail::parse_numbers(value, xs) || xs.size() != 4)
        fail(full, "expected xmin xmax ymin ymax");
      else
        c.ue_box = {xs[0], xs[1], xs[2], xs[3]};
    } else if (full == "geometry.ue_positions") {
      std::vector<double> xs;
      if (!detail::parse_numbers(value, xs) || xs.size() % 2 != 0 || xs.empty())
        fail(full, "expected an even list of coordinates x0 y0 x1 y1 ...");
      else {
        c.ue_positions.clear();
        for (std::size_t i = 0; i + 1 < xs.size(); i += 2) c.ue_positions.push_back({xs[i], xs[i + 1]});
      }
    } else if (full == "budget.c0_db") num(c.budget.c0_db);
    else if (full == "budget.pl_exp_bs_ris") num(c.budget.exp_bs_ris);
    else if (full == "budget.pl_exp_ris_ue") num(c.budget.exp_ris_ue);
    else if (full == "budget.pl_exp_bs_ue") num(c.budget.exp_bs_ue);
    else if (full == "budget.tx_snr_db") num(c.budget.tx_snr_db);
    else if (full == "ris.n_states") num(c.n_states);
    else if (full == "ris.ts_slots") num(c.ts_slots);
    else if (full == "ris.beam_angles_deg") {
      if (!detail::parse_numbers(value, c.beam_angles_deg)) fail(full, "expected a list of angles");
    } else if (full == "ris.diffuse_floor_db") num(c.diffuse_floor_db);
    else if (full == "ris.floor_mode") {
      if (value == "off") c.floor_mode = FloorMode::kOff;
      else if (value == "replace") c.floor_mode = FloorMode::kReplace;
      else if (value == "additive") c.floor_mode = FloorMode::kAdditive;
      else fail(full, "expected off|replace|additive, got '" + value + "'");
    } else if (full == "scheduler.tc_slots") num(c.tc_slots);
    else if (full == "scheduler.ewma_init") num(c.ewma_init);
    else if (full == "nr.n_prb") num(c.n_prb);
    else if (full == "nr.n_symbols") num(c.n_symbols);
    else if (full == "nr.dl_overhead") num(c.dl_overhead);
    else if (full == "nr.tdd_dl_slots") num(c.tdd_dl_slots);
    else if (full == "nr.tdd_period_slots") num(c.tdd_period_slots);
    else if (full == "nr.bler_window_slots") num(c.bler_window_slots);
    else if (full == "nr.rsrp_period_slots") num(c.rsrp_period_slots);
    else if (full == "nr.rsrp_ref_dbm") num(c.rsrp_ref_dbm);
    else if (full == "nr.mcs_min") num(c.mcs_min);
    else if (full == "nr.mcs_max") num(c.mcs_max);
    else if (full == "sweep.ts_slots_list") {
      if (!detail::parse_numbers(value, c.ts_slots_list)) fail(full, "expected a list of slot counts");
    } else if (full == "sweep.tc_slots_list") {
      if (!detail::parse_numbers(value, c.tc_slots_list)) fail(full, "expected a list of slot counts");
    } else if (full == "sweep.ts_seconds_list") {
      if (!detail::parse_numbers(value, c.ts_seconds_list)) fail(full, "expected a list of seconds");
    } else if (full == "sweep.tc_seconds_list") {
      if (!detail::parse_numbers(value, c.tc_seconds_list)) fail(full, "expected a list of seconds");
    } else if (full == "heatmap.ue1_angles_deg") {
      if (!detail::parse_numbers(value, c.heatmap_ue1_angles_deg)) fail(full, "expected a list of angles");
    } else if (full == "heatmap.ue2_angles_deg") {
      if (!detail::parse_numbers(value, c.heatmap_ue2_angles_deg)) fail(full, "expected a list of angles");
    } else if (full == "heatmap.distances_m") {
      if (!detail::parse_numbers(value, c.heatmap_distances_m)) fail(full, "expected a list of distances");
    } else {
      fail(full, "unknown key");
    }
  }

  for (const std::string& e : c.validate()) out.errors.push_back(e);
  return out;
}

inline ConfigParse parse_config_text(const std::string& text, const SimConfig& base = SimConfig{}) {
  std::istringstream in(text);
  return parse_config(in, base);
}

// Canonical one-line-per-field dump. Used for the run-metadata hash, so it
// covers every field that affects results.
inline std::string dump_config(const SimConfig& c) {
  std::ostringstream out;
  out.precision(17);
  auto mode = [](SimMode m) { return m == SimMode::kTheory ? "theory" : "nr"; };
  auto sched = [](SchedulerKind s) {
    switch (s) {
      case SchedulerKind::kPf: return "pf";
      case SchedulerKind::kRr: return "rr";
      case SchedulerKind::kGenie: return "genie";
      default: return "no-ris";
    }
  };
  auto floor = [](FloorMode f) {
    switch (f) {
      case FloorMode::kOff: return "off";
      case FloorMode::kReplace: return "replace";
      default: return "additive";
    }
  };
  out << "system.mode=" << mode(c.mode) << '\n'
      << "system.scheduler=" << sched(c.scheduler) << '\n'
      << "system.n_slots=" << c.n_slots << '\n'
      << "system.n_trials=" << c.n_trials << '\n'
      << "system.seed=" << c.seed << '\n'
      << "system.slot_duration_ms=" << c.slot_duration_ms << '\n'
      << "system.redraw_placement_per_trial=" << c.redraw_placement_per_trial << '\n'
      << "system.fading_refresh=" << (c.fading_refresh == FadingRefresh::kStatic ? "static" : "per-block") << '\n'
      << "geometry.bs_position=" << c.bs_position.x << ' ' << c.bs_position.y << '\n'
      << "geometry.ris_position=" << c.ris_position.x << ' ' << c.ris_position.y << '\n'
      << "geometry.ris_nx=" << c.ris_nx << '\n'
      << "geometry.ris_ny=" << c.ris_ny << '\n'
      << "geometry.ris_spacing=" << c.ris_spacing << '\n'
      << "geometry.ue_count=" << c.effective_ue_count() << '\n';
  out << "geometry.ue_box=";
  for (double v : c.ue_box) out << v << ' ';
  out << '\n' << "geometry.ue_positions=";
  for (const Vec2& p : c.ue_positions) out << p.x << ' ' << p.y << ' ';
  out << '\n'
      << "budget.c0_db=" << c.budget.c0_db << '\n'
      << "budget.pl_exp_bs_ris=" << c.budget.exp_bs_ris << '\n'
      << "budget.pl_exp_ris_ue=" << c.budget.exp_ris_ue << '\n'
      << "budget.pl_exp_bs_ue=" << c.budget.exp_bs_ue << '\n'
      << "budget.tx_snr_db=" << c.budget.tx_snr_db << '\n'
      << "ris.n_states=" << c.n_states << '\n'
      << "ris.ts_slots=" << c.ts_slots << '\n';
  out << "ris.beam_angles_deg=";
  for (double a : c.beam_angles_deg) out << a << ' ';
  out << '\n'
      << "ris.diffuse_floor_db=" << c.diffuse_floor_db << '\n'
      << "ris.floor_mode=" << floor(c.floor_mode) << '\n'
      << "scheduler.tc_slots=" << c.tc_slots << '\n'
      << "scheduler.ewma_init=" << c.ewma_init << '\n'
      << "nr.n_prb=" << c.n_prb << '\n'
      << "nr.n_symbols=" << c.n_symbols << '\n'
      << "nr.dl_overhead=" << c.dl_overhead << '\n'
      << "nr.tdd_dl_slots=" << c.tdd_dl_slots << '\n'
      << "nr.tdd_period_slots=" << c.tdd_period_slots << '\n'
      << "nr.bler_window_slots=" << c.bler_window_slots << '\n'
      << "nr.rsrp_period_slots=" << c.rsrp_period_slots << '\n'
      << "nr.rsrp_ref_dbm=" << c.rsrp_ref_dbm << '\n'
      << "nr.mcs_min=" << c.mcs_min << '\n'
      << "nr.mcs_max=" << c.mcs_max << '\n';
  return out.str();
}

}  // namespace risim
