// gyrosat: simulate tumbles, recover saturated gyro axes, evaluate against truth.

#include <CLI11.hpp>

#include <iostream>

#include "gyrosat/cli.hpp"

namespace cli = gyrosat::cli;

int main(int argc, char** argv) {
  CLI::App app{"Saturated-gyroscope recovery from accelerometer data in free fall"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "gyrosat 0.1.0");

  cli::SimulateOptions sim;
  std::uint64_t sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Simulate one tumbling run");
  simulate->add_option("--config", sim.config, "Scenario config file")->required();
  auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "Random seed (overrides config)");
  simulate->add_option("--out", sim.out, "Output directory")->required();

  cli::EstimateOptions est;
  std::string est_config;
  auto* estimate = app.add_subcommand("estimate", "Recover and smooth angular velocity");
  estimate->add_option("--input", est.input, "Measurement CSV (t,gx,gy,gz,ax,ay,az)")->required();
  estimate->add_option("--config", est_config, "Rig config file");
  estimate->add_option("--out", est.out, "Output directory")->required();
  estimate->add_flag("--frozen-axis", est.frozen_axis, "Freeze the rotation axis at window entry");
  estimate->add_flag("--bootstrap-axis", est.bootstrap_axis,
                     "Seed windows without a predecessor from their first sample");

  cli::EvaluateOptions ev;
  std::string ev_batch;
  bool ev_pooled = false;
  bool ev_per_run = false;
  auto* evaluate = app.add_subcommand("evaluate", "Error statistics inside saturation windows");
  evaluate->add_option("--estimates", ev.estimates, "Estimates CSV");
  evaluate->add_option("--truth", ev.truth, "Truth CSV (t,wx,wy,wz)");
  evaluate->add_option("--windows", ev.windows, "Windows CSV (axis,t_start,t_end)");
  evaluate->add_option("--raw", ev.raw, "Measurement CSV holding the raw clipped gyro");
  evaluate->add_option("--batch", ev_batch, "Directory of run directories to evaluate together");
  evaluate->add_option("--out", ev.out, "Output directory");
  evaluate->add_flag("--pooled", ev_pooled, "Aggregate by pooling samples across runs");
  evaluate->add_flag("--per-run", ev_per_run, "Aggregate per-run statistics");
  evaluate->add_flag("--plot-data", ev.plot_data, "Write plot.csv time series with 3-sigma band");
  evaluate->add_flag("--vector-norm", ev.vector_norm, "Use the 3-vector error norm");

  cli::BatchOptions batch;
  bool batch_pooled = false;
  bool batch_per_run = false;
  auto* batch_cmd = app.add_subcommand("batch", "simulate, estimate and evaluate over N seeds");
  batch_cmd->add_option("--config", batch.config, "Scenario config file")->required();
  batch_cmd->add_option("--seed", batch.seed, "First seed");
  batch_cmd->add_option("--runs", batch.runs, "Number of runs")->capture_default_str();
  batch_cmd->add_option("--out", batch.out, "Output directory")->required();
  batch_cmd->add_flag("--frozen-axis", batch.frozen_axis, "Freeze the rotation axis at window entry");
  batch_cmd->add_flag("--bootstrap-axis", batch.bootstrap_axis,
                      "Seed windows without a predecessor from their first sample");
  batch_cmd->add_flag("--pooled", batch_pooled, "Only the pooled aggregate");
  batch_cmd->add_flag("--per-run", batch_per_run, "Only the per-run aggregate");
  batch_cmd->add_flag("--plot-data", batch.plot_data, "Write plot.csv per run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kOk : cli::kUsageError;
  }

  auto mode = [](bool pooled, bool per_run) {
    if (pooled && !per_run) return cli::AggregateMode::Pooled;
    if (per_run && !pooled) return cli::AggregateMode::PerRun;
    return cli::AggregateMode::Both;
  };

  if (simulate->parsed()) {
    if (sim_seed_opt->count() > 0) sim.seed = sim_seed;
    return cli::run_guarded([&] { cli::cmd_simulate(sim); });
  }
  if (estimate->parsed()) {
    if (!est_config.empty()) est.config = est_config;
    return cli::run_guarded([&] { cli::cmd_estimate(est); });
  }
  if (evaluate->parsed()) {
    ev.aggregate = mode(ev_pooled, ev_per_run);
    if (!ev_batch.empty()) {
      ev.batch_dir = ev_batch;
    } else if (ev.estimates.empty() || ev.truth.empty() || ev.windows.empty() || ev.raw.empty() ||
               ev.out.empty()) {
      std::cerr << "error: evaluate needs --estimates, --truth, --windows, --raw and --out, or --batch\n";
      return cli::kUsageError;
    }
    return cli::run_guarded([&] {
      const auto reports = cli::cmd_evaluate(ev);
      for (const auto& r : reports) {
        std::cout << r.run << ": median " << r.raw.median << " -> " << r.recovered.median
                  << " rad/s (" << r.median_reduction_pct << " %)\n";
      }
    });
  }
  if (batch_cmd->parsed()) {
    batch.aggregate = mode(batch_pooled, batch_per_run);
    return cli::run_guarded([&] {
      const auto reports = cli::cmd_batch(batch);
      for (const auto& r : reports) {
        if (r.run == "pooled" || r.run == "per_run") {
          std::cout << r.run << ": median " << r.raw.median << " -> " << r.recovered.median
                    << " rad/s (" << r.median_reduction_pct << " %)\n";
        }
      }
    });
  }
  return cli::kUsageError;
}
