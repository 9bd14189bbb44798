#pragma once

// Subcommand implementations behind the `gyrosat` executable. Each writes its
// outputs atomically into an output directory that is created if missing.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gyrosat/eval.hpp"

namespace gyrosat::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kUsageError = 1, kDataError = 2 };

enum class AggregateMode { Both, Pooled, PerRun };

struct SimulateOptions {
  fs::path config;
  std::optional<std::uint64_t> seed;
  fs::path out;
};

struct EstimateOptions {
  fs::path input;
  std::optional<fs::path> config;
  fs::path out;
  bool frozen_axis = false;
  bool bootstrap_axis = false;
};

struct EvaluateOptions {
  fs::path estimates;
  fs::path truth;
  fs::path windows;
  fs::path raw;  ///< measurement CSV; the raw clipped signal
  std::optional<fs::path> batch_dir;
  fs::path out;
  AggregateMode aggregate = AggregateMode::Both;
  bool plot_data = false;
  bool vector_norm = false;
};

struct BatchOptions {
  fs::path config;
  std::uint64_t seed = 0;
  std::size_t runs = 32;
  fs::path out;
  bool frozen_axis = false;
  bool bootstrap_axis = false;
  AggregateMode aggregate = AggregateMode::Both;
  bool plot_data = false;
};

// File names inside run directories.
inline constexpr const char* kMeasurementsFile = "measurements.csv";
inline constexpr const char* kTruthFile = "truth.csv";
inline constexpr const char* kRigFile = "rig.cfg";
inline constexpr const char* kEstimatesFile = "estimates.csv";
inline constexpr const char* kFusedFile = "fused.csv";
inline constexpr const char* kWindowsFile = "windows.csv";
inline constexpr const char* kReportCsv = "report.csv";
inline constexpr const char* kReportText = "report.txt";
inline constexpr const char* kPlotFile = "plot.csv";
inline constexpr const char* kManifestPrefix = "manifest_";

void cmd_simulate(const SimulateOptions& opts);
void cmd_estimate(const EstimateOptions& opts);
/// Returns the reports written (per-run rows followed by aggregates).
std::vector<ErrorReport> cmd_evaluate(const EvaluateOptions& opts);
std::vector<ErrorReport> cmd_batch(const BatchOptions& opts);

/// Runs `fn`, mapping exceptions to exit codes and printing "error: ..." to stderr.
int run_guarded(const std::function<void()>& fn);

}  // namespace gyrosat::cli
