#pragma once

// Continuous-time smoothing of fused angular velocity.
//
// Each axis is modelled independently as a Gaussian process whose second
// derivative (angular jerk) is white noise with PSD q. The latent state
// [omega, omega_dot] is Markovian, so the batch GP posterior is computed
// exactly by a forward Kalman pass followed by a Rauch-Tung-Striebel pass.

#include <Eigen/Core>

#include <array>
#include <span>
#include <vector>

#include "gyrosat/simd/kernels.hpp"
#include "gyrosat/types.hpp"

namespace gyrosat {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Transition and process noise of the prior over an interval `dt`.
struct PriorBlocks {
  Mat2 transition;
  Mat2 noise;
};

/// Phi(dt) = [[1, dt], [0, 1]],  Q(dt) = q [[dt^3/3, dt^2/2], [dt^2/2, dt]].
PriorBlocks jerk_prior(double dt, double q);

/// Initial variance of omega_dot at the first knot.
inline constexpr double kInitialRateVariance = 1e4;
/// Initial variance of omega at the first knot when it carries no measurement.
inline constexpr double kDiffuseVariance = 1e4;

/// Posterior over [omega, omega_dot] for one axis.
struct SmootherState {
  Vec2 mean = Vec2::Zero();
  Mat2 cov = Mat2::Identity();
};

struct QueryResult {
  Vec3 omega = Vec3::Zero();
  Vec3 var = Vec3::Zero();
};

class SmoothedTrajectory {
 public:
  SmoothedTrajectory() = default;

  std::size_t size() const noexcept { return times_.size(); }
  std::span<const double> times() const noexcept { return times_; }
  double jerk_psd() const noexcept { return q_; }

  const SmootherState& state(std::size_t knot, Axis a) const { return knots_.at(knot)[index(a)]; }
  /// Provenance of the input estimate at `knot`.
  const std::array<Source, 3>& provenance(std::size_t knot) const { return provenance_.at(knot); }

  /// Posterior mean and variance of omega at each knot, tagged Smoothed.
  std::vector<VelocityEstimate> knot_estimates() const;

  /// Posterior at any time within the knot span. Exact at knots; between knots
  /// the GP bridge conditioned on the neighbouring knot posteriors.
  /// Throws std::out_of_range("extrapolation not supported") outside the span.
  QueryResult query(double t) const;

  /// Full [omega, omega_dot] posterior for one axis at time t.
  SmootherState query_state(double t, Axis a) const;

 private:
  friend SmoothedTrajectory smooth(std::span<const VelocityEstimate>, const RigConfig&,
                                   const simd::KernelTable&);

  std::vector<double> times_;
  std::vector<std::array<SmootherState, 3>> knots_;
  std::vector<std::array<Mat2, 3>> cross_;  // Cov(x_k, x_{k+1})
  std::vector<std::array<Source, 3>> provenance_;
  double q_ = 0.0;
};

/// Observation variance for one axis of an estimate, or a negative value if
/// the axis carries no measurement.
double observation_variance(const VelocityEstimate& est, Axis a, const RigConfig& cfg);

/// Smooths the estimates under the jerk prior with PSD cfg.jerk_psd.
/// Requires at least two estimates with strictly increasing times.
SmoothedTrajectory smooth(std::span<const VelocityEstimate> estimates, const RigConfig& cfg,
                          const simd::KernelTable& kernels = simd::active_kernels());

}  // namespace gyrosat
