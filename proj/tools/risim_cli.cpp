// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Subcommands:
//   run      one configuration, per-trial summary CSV, optional slot trace
//   fig3     scheduler comparison sweep over the fairness horizon
//   tcts     switching-interval / fairness-horizon grid (desk scenario)
//   heatmap  two-user placement heatmap, surface on vs off
//   bound    fairness-horizon sizing from the concentration bound

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "risim/risim.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int trials = 0;
  int threads = -1;
  std::string mode;
  bool seed_set = false;
  bool trials_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "Scenario config file (plain text)");
  cmd->add_option("--out", opts.out_dir, "Output directory for CSV files");
  cmd->add_option("--seed", opts.seed, "Base seed")->each([&opts](const std::string&) {
    opts.seed_set = true;
  });
  cmd->add_option("--trials", opts.trials, "Number of independent trials")
      ->each([&opts](const std::string&) { opts.trials_set = true; });
  cmd->add_option("--threads", opts.threads, "Worker threads (0 = all cores)");
  cmd->add_option("--mode", opts.mode, "Simulation mode: theory or nr")
      ->check(CLI::IsMember({"theory", "nr"}));
}

// Loads the config file (if any), applies command-line overrides, and
// validates. Throws std::runtime_error with a printable diagnostic.
risim::SimConfig resolve_config(const CommonOpts& opts) {
  risim::SimConfig cfg;
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    if (!in) throw std::runtime_error("cannot open config file: " + opts.config_path);
    risim::ConfigParse parsed = risim::parse_config(in);
    if (!parsed.ok()) {
      std::string msg = "config errors in " + opts.config_path + ":";
      for (const std::string& e : parsed.errors) msg += "\n  " + e;
      throw std::runtime_error(msg);
    }
    cfg = parsed.config;
  }
  if (opts.seed_set) cfg.seed = opts.seed;
  if (opts.trials_set) cfg.n_trials = opts.trials;
  if (opts.threads >= 0) cfg.threads = opts.threads;
  if (opts.mode == "theory") cfg.mode = risim::SimMode::kTheory;
  else if (opts.mode == "nr") cfg.mode = risim::SimMode::kNr;
  const std::vector<std::string> errors = cfg.validate();
  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const std::string& e : errors) msg += "\n  " + e;
    throw std::runtime_error(msg);
  }
  std::filesystem::create_directories(opts.out_dir);
  return cfg;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

int cmd_run(const CommonOpts& opts, const std::string& trace_path) {
  const risim::SimConfig cfg = resolve_config(opts);

  std::ofstream trace_out;
  std::unique_ptr<risim::TraceSink> sink;
  if (!trace_path.empty()) {
    if (cfg.n_trials != 1)
      throw std::runtime_error("--trace records a single trajectory; use --trials 1");
    trace_out.open(trace_path, std::ios::binary);
    if (!trace_out) throw std::runtime_error("cannot open trace file: " + trace_path);
    trace_out << "slot,ris_state,scheduled_ue,is_retx,mcs,bler,delivered_bits\n";
    sink = std::make_unique<risim::TraceSink>([&trace_out](const risim::TraceRecord& r) {
      trace_out << r.slot << ',' << r.ris_state << ',' << r.scheduled_ue << ','
                << (r.is_retransmission ? 1 : 0) << ',' << r.mcs << ','
                << risim::format_number(r.bler) << ',' << r.delivered_bits << '\n';
    });
  }

  std::vector<risim::RunSummary> runs;
  if (sink) {
    runs.push_back(risim::run_single(cfg, 0, sink.get()));
  } else {
    runs = risim::run_trials(cfg);
  }

  const std::string csv_path = join_path(opts.out_dir, "run.csv");
  risim::CsvWriter csv(csv_path);
  csv.row({"trial", "n_data_slots", "mean_rate_bps_hz", "throughput_mbps", "tv_p", "tv_q",
           "optimality_gap", "aligned_bound_bps_hz", "harq_retx", "harq_discards",
           "mean_scheduled_mcs"});
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const risim::RunSummary& r = runs[i];
    csv.row({std::to_string(i), std::to_string(r.n_data_slots),
             risim::format_number(r.mean_system_rate), risim::format_number(r.throughput_mbps),
             risim::format_number(r.tv_p), risim::format_number(r.tv_q),
             risim::format_number(r.optimality_gap), risim::format_number(r.genie_system),
             std::to_string(r.harq_retx), std::to_string(r.harq_discards),
             risim::format_number(r.mean_scheduled_mcs)});
  }
  risim::write_metadata(csv_path, cfg, {{"sweep", "run"}});

  const risim::CellStats stats = risim::summarize(
      cfg.mode == risim::SimMode::kNr ? risim::extract_mbps(runs)
                                      : risim::extract_system_rate(runs));
  std::printf("%d trial(s), %lld slots each\n", cfg.n_trials,
              static_cast<long long>(cfg.n_slots));
  if (cfg.mode == risim::SimMode::kNr)
    std::printf("mean throughput: %.4f Mbps (ci95 +/- %.4f)\n", stats.mean, stats.ci95_half);
  else
    std::printf("mean served rate: %.6f bit/s/Hz (ci95 +/- %.6f)\n", stats.mean, stats.ci95_half);
  std::printf("wrote %s\n", csv_path.c_str());
  return 0;
}

int cmd_fig3(const CommonOpts& opts) {
  const risim::SimConfig base = resolve_config(opts);
  const auto rows = risim::scenario_scheduler_sweep(base);
  const std::string path = join_path(opts.out_dir, "fig3.csv");
  risim::write_scheduler_sweep_csv(path, rows, base);
  std::printf("wrote %s (%zu rows)\n", path.c_str(), rows.size());
  return 0;
}

int cmd_tcts(const CommonOpts& opts) {
  const risim::SimConfig base = resolve_config(opts);
  const auto rows = risim::scenario_interval_grid(base);
  const std::string path = join_path(opts.out_dir, "tcts.csv");
  risim::write_interval_grid_csv(path, rows, base);
  std::printf("wrote %s (%zu rows)\n", path.c_str(), rows.size());
  return 0;
}

int cmd_heatmap(const CommonOpts& opts) {
  const risim::SimConfig base = resolve_config(opts);
  const risim::HeatmapResult result = risim::scenario_heatmap(base);
  const std::string path = join_path(opts.out_dir, "heatmap.csv");
  risim::write_heatmap_csv(path, result, base);
  std::printf("wrote %s (%zu rows)\n", path.c_str(), result.rows.size());
  return 0;
}

int cmd_bound(const CommonOpts& opts, risim::BoundParams params, bool write_csv) {
  params.validate();
  const risim::BoundRow row = risim::bound_report(params);
  std::printf("required_tc_slots = %lld\n", static_cast<long long>(row.required_tc_slots));
  std::printf("gap bound 2K(eps1+eps2) = %.6g at confidence >= %.4g\n", row.gap_bound,
              row.confidence);
  if (write_csv) {
    std::filesystem::create_directories(opts.out_dir);
    const std::string path = join_path(opts.out_dir, "bound.csv");
    risim::SimConfig meta_cfg;  // bound output depends only on the params
    risim::write_bound_csv(path, {row}, meta_cfg);
    std::printf("wrote %s\n", path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized-surface multi-user downlink simulator"};
  app.require_subcommand(1);

  CommonOpts run_opts, fig3_opts, tcts_opts, heatmap_opts, bound_opts;
  std::string trace_path;

  CLI::App* run = app.add_subcommand("run", "Run one configuration");
  add_common(run, run_opts);
  run->add_option("--trace", trace_path, "Write a per-slot trace CSV (single trial)");

  CLI::App* fig3 = app.add_subcommand("fig3", "Scheduler comparison sweep");
  add_common(fig3, fig3_opts);

  CLI::App* tcts = app.add_subcommand("tcts", "Switching/fairness interval grid");
  add_common(tcts, tcts_opts);

  CLI::App* heatmap = app.add_subcommand("heatmap", "Two-user placement heatmap");
  add_common(heatmap, heatmap_opts);

  CLI::App* bound = app.add_subcommand("bound", "Fairness-horizon sizing bound");
  add_common(bound, bound_opts);
  risim::BoundParams params;
  bool bound_csv = false;
  bound->add_option("--eps1", params.eps1, "Switching-side deviation tolerance");
  bound->add_option("--eps2", params.eps2, "Scheduling-side deviation tolerance");
  bound->add_option("--eta1", params.eta1, "Switching-side failure probability");
  bound->add_option("--eta2", params.eta2, "Scheduling-side failure probability");
  bound->add_option("--L", params.n_states, "Number of switching states");
  bound->add_option("--K", params.n_ues, "Number of users");
  bound->add_option("--ts", params.ts_slots, "Switching interval in slots");
  bound->add_flag("--csv", bound_csv, "Also write bound.csv to --out");

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(run_opts, trace_path);
    if (fig3->parsed()) return cmd_fig3(fig3_opts);
    if (tcts->parsed()) return cmd_tcts(tcts_opts);
    if (heatmap->parsed()) return cmd_heatmap(heatmap_opts);
    if (bound->parsed()) return cmd_bound(bound_opts, params, bound_csv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
