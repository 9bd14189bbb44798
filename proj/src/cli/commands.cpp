#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "gyrosat/cli.hpp"
#include "gyrosat/config.hpp"
#include "gyrosat/freefall.hpp"
#include "gyrosat/imu_core.hpp"
#include "gyrosat/io.hpp"
#include "gyrosat/sim.hpp"
#include "gyrosat/smoother.hpp"

namespace gyrosat::cli {
namespace {

void require_file(const fs::path& p, const char* what) {
  if (!fs::is_regular_file(p)) {
    throw ConfigError(std::string(what) + " not found: " + p.string());
  }
}

void prepare_out(const fs::path& out) {
  if (out.empty()) throw ConfigError("output directory not given");
  fs::create_directories(out);
}

struct Manifest {
  std::vector<std::pair<std::string, std::string>> entries;
  void add(std::string key, std::string value) { entries.emplace_back(std::move(key), std::move(value)); }
  std::string text() const {
    std::string s;
    for (const auto& [k, v] : entries) s += k + " = " + v + '\n';
    return s;
  }
};

// One manifest per command so chained commands in a run directory do not collide.
std::string manifest_name(const Manifest& m) {
  return std::string(kManifestPrefix) + m.entries.front().second + ".txt";
}

std::string mode_name(AggregateMode m) {
  switch (m) {
    case AggregateMode::Both:
      return "both";
    case AggregateMode::Pooled:
      return "pooled";
    case AggregateMode::PerRun:
      return "per_run";
  }
  return "both";
}

// Errors of one run directory's files, restricted to its windows.
RunErrors run_errors(const std::string& name, const fs::path& estimates, const fs::path& truth_path,
                     const fs::path& windows_path, const fs::path& raw_path, ErrorMetric metric,
                     const std::optional<fs::path>& plot_out) {
  require_file(estimates, "estimates file");
  require_file(truth_path, "truth file");
  require_file(windows_path, "windows file");
  require_file(raw_path, "measurements file");
  const std::vector<VelocityEstimate> est = read_estimates_csv(estimates);
  const std::vector<VelocityEstimate> raw = read_estimates_csv(raw_path);
  const std::vector<TruthSample> truth = read_truth_csv(truth_path);
  const std::vector<SaturationWindow> windows = read_windows_csv(windows_path);

  const Alignment est_pairs = align_truth(truth, est);
  const Alignment raw_pairs = align_truth(truth, raw);

  RunErrors run;
  run.run = name;
  run.raw = saturation_errors(raw_pairs.pairs, windows, metric);
  run.recovered = saturation_errors(est_pairs.pairs, windows, metric);

  if (plot_out) {
    // Long format: one row per truth time and axis, with a 3-sigma band.
    std::ostringstream os;
    os << "t,axis,saturated,truth,raw,recovered,lower_3sigma,upper_3sigma\n";
    std::size_t j = 0;
    for (const PairedSample& p : est_pairs.pairs) {
      while (j < raw_pairs.pairs.size() && raw_pairs.pairs[j].t < p.t) ++j;
      const bool have_raw = j < raw_pairs.pairs.size() && raw_pairs.pairs[j].t == p.t;
      for (int a = 0; a < 3; ++a) {
        const bool sat = std::any_of(windows.begin(), windows.end(), [&](const SaturationWindow& w) {
          return index(w.axis) == static_cast<std::size_t>(a) && w.contains_time(p.t);
        });
        const double sd = std::sqrt(std::max(0.0, p.var[a]));
        os << format_double(p.t) << ',' << axis_name(axis_from_index(static_cast<std::size_t>(a)))
           << ',' << (sat ? 1 : 0) << ',' << format_double(p.truth[a]) << ','
           << (have_raw ? format_double(raw_pairs.pairs[j].estimate[a]) : std::string("nan")) << ','
           << format_double(p.estimate[a]) << ',' << format_double(p.estimate[a] - 3.0 * sd) << ','
           << format_double(p.estimate[a] + 3.0 * sd) << '\n';
      }
    }
    write_file_atomic(*plot_out, os.str());
  }
  return run;
}

std::vector<ErrorReport> write_reports(const std::vector<RunErrors>& runs, AggregateMode mode,
                                       const fs::path& out, bool batch) {
  std::vector<ErrorReport> reports;
  std::string skipped;
  for (const RunErrors& r : runs) {
    if (r.raw.empty() || r.recovered.empty()) {
      skipped += "  " + r.run + ": no saturated samples\n";
      continue;
    }
    reports.push_back(saturation_error_report(r));
  }
  if (reports.empty()) throw DataError("no saturated samples");
  if (batch) {
    if (mode != AggregateMode::PerRun) reports.push_back(aggregate(runs, Pooling::Pooled));
    if (mode != AggregateMode::Pooled) reports.push_back(aggregate(runs, Pooling::PerRun));
  }
  write_file_atomic(out / kReportCsv, report_csv(reports));
  std::string text = report_text(reports);
  if (!skipped.empty()) text += "\nSkipped runs:\n" + skipped;
  write_file_atomic(out / kReportText, text);
  return reports;
}

}  // namespace

void cmd_simulate(const SimulateOptions& opts) {
  require_file(opts.config, "config file");
  const KeyValueConfig kv = KeyValueConfig::load(opts.config);
  const ScenarioConfig scenario = scenario_from(kv, opts.seed);
  const RigConfig rig = rig_for_scenario(scenario, kv);
  prepare_out(opts.out);

  const ScenarioResult result = run_scenario(scenario);
  write_file_atomic(opts.out / kMeasurementsFile, imu_csv(result.measurements));
  write_file_atomic(opts.out / kTruthFile, truth_csv(result.truth));
  write_file_atomic(opts.out / kRigFile, rig_config_text(rig));

  Manifest m;
  m.add("command", "simulate");
  m.add("config", opts.config.filename().string());
  m.add("seed", std::to_string(scenario.seed));
  m.add("samples", std::to_string(result.measurements.size()));
  m.add("collisions", std::to_string(scenario.collisions.size()));
  write_file_atomic(opts.out / manifest_name(m), m.text());
}

void cmd_estimate(const EstimateOptions& opts) {
  require_file(opts.input, "measurements file");
  RigConfig rig;
  if (opts.config) {
    require_file(*opts.config, "config file");
    rig = rig_config_from(KeyValueConfig::load(*opts.config));
  }
  rig.frozen_axis = rig.frozen_axis || opts.frozen_axis;
  rig.bootstrap_axis = rig.bootstrap_axis || opts.bootstrap_axis;
  rig.validate();

  const std::vector<ImuSample> samples = normalize_stream(read_imu_csv(opts.input));
  if (samples.size() < 2) throw DataError("stream needs at least 2 samples");
  prepare_out(opts.out);

  const std::vector<SaturationWindow> windows = detect_saturation(samples, rig);
  const RecoveredStream fused = recover_stream(samples, windows, rig);
  const SmoothedTrajectory traj = smooth(fused.estimates, rig);

  std::vector<VelocityEstimate> out = traj.knot_estimates();
  // Values are smoothed; the source columns keep each axis' input provenance.
  for (std::size_t k = 0; k < out.size(); ++k) out[k].source = traj.provenance(k);

  write_file_atomic(opts.out / kEstimatesFile, estimates_csv(out));
  write_file_atomic(opts.out / kFusedFile, estimates_csv(fused.estimates));
  write_file_atomic(opts.out / kWindowsFile, windows_csv(windows));

  Manifest m;
  m.add("command", "estimate");
  m.add("input", opts.input.filename().string());
  if (opts.config) m.add("config", opts.config->filename().string());
  m.add("frozen_axis", rig.frozen_axis ? "true" : "false");
  m.add("bootstrap_axis", rig.bootstrap_axis ? "true" : "false");
  m.add("samples", std::to_string(samples.size()));
  m.add("windows", std::to_string(windows.size()));
  m.add("measured", std::to_string(fused.counts.measured));
  for (RecoveryStatus s : {RecoveryStatus::Recovered, RecoveryStatus::Clamped,
                           RecoveryStatus::NegativeRadicand, RecoveryStatus::AccelClipped,
                           RecoveryStatus::MultiAxis, RecoveryStatus::DegenerateLever,
                           RecoveryStatus::NoPriorAxis}) {
    m.add(std::string(to_string(s)), std::to_string(fused.counts.count(s)));
  }
  write_file_atomic(opts.out / manifest_name(m), m.text());
}

std::vector<ErrorReport> cmd_evaluate(const EvaluateOptions& opts) {
  const ErrorMetric metric = opts.vector_norm ? ErrorMetric::VectorNorm : ErrorMetric::AxisSpeed;
  std::vector<RunErrors> runs;
  fs::path out = opts.out;
  if (opts.batch_dir) {
    if (!fs::is_directory(*opts.batch_dir)) {
      throw ConfigError("batch directory not found: " + opts.batch_dir->string());
    }
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(*opts.batch_dir)) {
      if (entry.is_directory() && fs::is_regular_file(entry.path() / kEstimatesFile)) {
        dirs.push_back(entry.path());
      }
    }
    std::sort(dirs.begin(), dirs.end());
    if (dirs.empty()) throw DataError("no run directories under " + opts.batch_dir->string());
    if (out.empty()) out = *opts.batch_dir;
    prepare_out(out);
    for (const fs::path& d : dirs) {
      const std::optional<fs::path> plot =
          opts.plot_data ? std::optional<fs::path>(d / kPlotFile) : std::nullopt;
      runs.push_back(run_errors(d.filename().string(), d / kEstimatesFile, d / kTruthFile,
                                d / kWindowsFile, d / kMeasurementsFile, metric, plot));
    }
    return write_reports(runs, opts.aggregate, out, true);
  }

  prepare_out(out);
  const std::optional<fs::path> plot =
      opts.plot_data ? std::optional<fs::path>(out / kPlotFile) : std::nullopt;
  runs.push_back(
      run_errors("run", opts.estimates, opts.truth, opts.windows, opts.raw, metric, plot));
  return write_reports(runs, opts.aggregate, out, false);
}

std::vector<ErrorReport> cmd_batch(const BatchOptions& opts) {
  require_file(opts.config, "config file");
  if (opts.runs == 0) throw ConfigError("batch needs at least one run");
  prepare_out(opts.out);
  const std::size_t width = std::to_string(opts.seed + opts.runs - 1).size();
  for (std::size_t i = 0; i < opts.runs; ++i) {
    const std::uint64_t seed = opts.seed + i;
    std::string name = std::to_string(seed);
    name.insert(0, width - name.size(), '0');
    const fs::path dir = opts.out / ("run_" + name);

    cmd_simulate({opts.config, seed, dir});
    EstimateOptions est;
    est.input = dir / kMeasurementsFile;
    est.config = dir / kRigFile;
    est.out = dir;
    est.frozen_axis = opts.frozen_axis;
    est.bootstrap_axis = opts.bootstrap_axis;
    cmd_estimate(est);
  }
  EvaluateOptions ev;
  ev.batch_dir = opts.out;
  ev.out = opts.out;
  ev.aggregate = opts.aggregate;
  ev.plot_data = opts.plot_data;
  Manifest m;
  m.add("command", "batch");
  m.add("config", opts.config.filename().string());
  m.add("first_seed", std::to_string(opts.seed));
  m.add("runs", std::to_string(opts.runs));
  m.add("frozen_axis", opts.frozen_axis ? "true" : "false");
  m.add("bootstrap_axis", opts.bootstrap_axis ? "true" : "false");
  m.add("aggregate", mode_name(opts.aggregate));
  write_file_atomic(opts.out / manifest_name(m), m.text());
  return cmd_evaluate(ev);
}

int run_guarded(const std::function<void()>& fn) {
  try {
    fn();
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
}

}  // namespace gyrosat::cli
