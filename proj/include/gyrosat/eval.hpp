#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gyrosat/imu_core.hpp"
#include "gyrosat/sim.hpp"
#include "gyrosat/smoother.hpp"
#include "gyrosat/types.hpp"

namespace gyrosat {

/// Truth and estimate at one truth timestamp.
struct PairedSample {
  double t = 0.0;
  Vec3 truth = Vec3::Zero();
  Vec3 estimate = Vec3::Zero();
  Vec3 var = Vec3::Zero();
};

struct Alignment {
  std::vector<PairedSample> pairs;
  std::size_t dropped = 0;  ///< truth samples without a partner
};

/// Pairs each truth sample inside the knot span with the trajectory queried at its time.
Alignment align_truth(std::span<const TruthSample> truth, const SmoothedTrajectory& traj);

/// Nearest-neighbour pairing: a truth sample is paired with the closest
/// estimate strictly within half the median estimate spacing. Throws DataError
/// when nothing overlaps.
Alignment align_truth(std::span<const TruthSample> truth, std::span<const VelocityEstimate> estimates);

enum class ErrorMetric { AxisSpeed, VectorNorm };

/// Absolute errors restricted to saturation windows: on the saturated axis
/// (AxisSpeed) or as the full 3-vector distance (VectorNorm).
std::vector<double> saturation_errors(std::span<const PairedSample> pairs,
                                      std::span<const SaturationWindow> windows,
                                      ErrorMetric metric = ErrorMetric::AxisSpeed);

struct ErrorStats {
  std::size_t count = 0;
  double median = 0.0;
  double mean = 0.0;
  double p90 = 0.0;
  double p99 = 0.0;
  double max = 0.0;
};

/// Linear-interpolated percentile (0..100) of an unsorted sample. Throws on empty input.
double percentile(std::vector<double> values, double pct);

ErrorStats summarize(std::span<const double> errors);

/// 100 (1 - recovered / raw); NaN when raw is zero.
double reduction_pct(double raw, double recovered) noexcept;

struct RunErrors {
  std::string run;
  std::vector<double> raw;
  std::vector<double> recovered;
};

struct ErrorReport {
  std::string run;
  ErrorStats raw;
  ErrorStats recovered;
  double median_reduction_pct = 0.0;
};

/// Throws DataError("no saturated samples") if either error set is empty.
ErrorReport saturation_error_report(const RunErrors& run);

/// Compares raw and recovered pairs for one run; both are restricted to `windows`.
ErrorReport saturation_error_stats(std::span<const PairedSample> raw,
                                   std::span<const PairedSample> recovered,
                                   std::span<const SaturationWindow> windows,
                                   ErrorMetric metric = ErrorMetric::AxisSpeed);

enum class Pooling { Pooled, PerRun };

/// Aggregate over runs. Pooled concatenates all errors; PerRun takes the
/// median (and other statistics) of the per-run statistics. Runs without
/// saturated samples are skipped.
ErrorReport aggregate(std::span<const RunErrors> runs, Pooling pooling);

/// `run,stat,raw,recovered,reduction_pct` rows, header included.
std::string report_csv(std::span<const ErrorReport> reports);
std::string report_text(std::span<const ErrorReport> reports);

}  // namespace gyrosat
