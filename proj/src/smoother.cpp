#include "gyrosat/smoother.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gyrosat {

PriorBlocks jerk_prior(double dt, double q) {
  PriorBlocks b;
  b.transition << 1.0, dt, 0.0, 1.0;
  const double dt2 = dt * dt;
  b.noise << q * dt2 * dt / 3.0, q * dt2 * 0.5, q * dt2 * 0.5, q * dt;
  return b;
}

double observation_variance(const VelocityEstimate& est, Axis a, const RigConfig& cfg) {
  const auto i = static_cast<Eigen::Index>(index(a));
  if (!std::isfinite(est.omega[i])) return -1.0;
  switch (est.source[index(a)]) {
    case Source::Measured:
      return cfg.gyro_noise_var;
    case Source::Recovered:
      return cfg.estimate_var;
    case Source::Rejected:
      return -1.0;
    case Source::Smoothed:
      return est.var[i] > 0.0 ? est.var[i] : -1.0;
  }
  return -1.0;
}

namespace {

SmootherState unpack(const simd::GaussLanes& g, std::size_t lane) {
  SmootherState s;
  s.mean << g.m0[lane], g.m1[lane];
  s.cov << g.p00[lane], g.p01[lane], g.p01[lane], g.p11[lane];
  return s;
}

Mat2 unpack(const simd::CrossLanes& c, std::size_t lane) {
  Mat2 m;
  m << c.c00[lane], c.c01[lane], c.c10[lane], c.c11[lane];
  return m;
}

void check_positive_definite(const Mat2& cov, std::size_t knot, std::size_t axis) {
  const Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (cov + cov.transpose()), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (!(lo > -1e-12 * scale)) {
    throw Error("smoother covariance lost positive definiteness at knot " + std::to_string(knot) +
                " axis " + std::to_string(axis));
  }
}

}  // namespace

SmoothedTrajectory smooth(std::span<const VelocityEstimate> estimates, const RigConfig& cfg,
                          const simd::KernelTable& kernels) {
  const std::size_t n = estimates.size();
  if (n < 2) throw DataError("smoothing needs at least 2 estimates");
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(estimates[k].t)) throw DataError("non-finite time at estimate " + std::to_string(k));
    if (k > 0 && !(estimates[k].t > estimates[k - 1].t)) {
      throw DataError("estimate times must be strictly increasing (index " + std::to_string(k) + ")");
    }
  }
  if (!(cfg.jerk_psd > 0.0)) throw ConfigError("jerk_psd must be > 0");

  std::vector<double> dt(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) dt[k] = estimates[k].t - estimates[k - 1].t;

  std::vector<simd::MeasurementLanes> meas(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t a = 0; a < 3; ++a) {
      const double v = observation_variance(estimates[k], axis_from_index(a), cfg);
      if (v > 0.0) {
        meas[k].y[a] = estimates[k].omega[static_cast<Eigen::Index>(a)];
        meas[k].r[a] = v;
        meas[k].present[a] = 1.0;
      }
    }
  }

  std::vector<simd::GaussLanes> pred(n), filt(n), smoothed(n);
  std::vector<simd::CrossLanes> cross(n);

  // The first knot's measurement seeds the prior and is not applied again.
  simd::GaussLanes& prior = filt[0];
  for (std::size_t a = 0; a < 4; ++a) {
    const bool seeded = a < 3 && meas[0].present[a] > 0.5;
    prior.m0[a] = seeded ? meas[0].y[a] : 0.0;
    prior.m1[a] = 0.0;
    prior.p00[a] = seeded ? meas[0].r[a] : (a < 3 ? kDiffuseVariance : 1.0);
    prior.p01[a] = 0.0;
    prior.p11[a] = a < 3 ? kInitialRateVariance : 1.0;
  }

  kernels.kf_forward(n, dt.data(), meas.data(), cfg.jerk_psd, pred.data(), filt.data());
  kernels.rts_backward(n, dt.data(), cfg.jerk_psd, pred.data(), filt.data(), smoothed.data(), cross.data());

  SmoothedTrajectory traj;
  traj.q_ = cfg.jerk_psd;
  traj.times_.resize(n);
  traj.knots_.resize(n);
  traj.cross_.resize(n > 0 ? n - 1 : 0);
  traj.provenance_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    traj.times_[k] = estimates[k].t;
    traj.provenance_[k] = estimates[k].source;
    for (std::size_t a = 0; a < 3; ++a) {
      traj.knots_[k][a] = unpack(smoothed[k], a);
      check_positive_definite(traj.knots_[k][a].cov, k, a);
      if (k + 1 < n) traj.cross_[k][a] = unpack(cross[k], a);
    }
  }
  return traj;
}

std::vector<VelocityEstimate> SmoothedTrajectory::knot_estimates() const {
  std::vector<VelocityEstimate> out(size());
  for (std::size_t k = 0; k < size(); ++k) {
    out[k].t = times_[k];
    for (std::size_t a = 0; a < 3; ++a) {
      out[k].omega[static_cast<Eigen::Index>(a)] = knots_[k][a].mean[0];
      out[k].var[static_cast<Eigen::Index>(a)] = knots_[k][a].cov(0, 0);
      out[k].source[a] = Source::Smoothed;
    }
  }
  return out;
}

SmootherState SmoothedTrajectory::query_state(double t, Axis axis) const {
  if (times_.empty() || !(t >= times_.front() && t <= times_.back())) {
    throw std::out_of_range("extrapolation not supported");
  }
  const std::size_t a = index(axis);
  const auto it = std::lower_bound(times_.begin(), times_.end(), t);
  const auto k1 = static_cast<std::size_t>(it - times_.begin());
  if (times_[k1] == t) return knots_[k1][a];

  const std::size_t k0 = k1 - 1;
  const SmootherState& s0 = knots_[k0][a];
  const SmootherState& s1 = knots_[k1][a];
  const Mat2& c01 = cross_[k0][a];

  const PriorBlocks first = jerk_prior(t - times_[k0], q_);
  const PriorBlocks second = jerk_prior(times_[k1] - t, q_);
  const PriorBlocks whole = jerk_prior(times_[k1] - times_[k0], q_);

  // x(t) | x_k0, x_k1 under the prior:  Lambda x_k0 + Psi x_k1 + noise.
  const Mat2 psi = first.noise * second.transition.transpose() * whole.noise.inverse();
  const Mat2 lambda = first.transition - psi * whole.transition;
  const Mat2 bridge = first.noise - psi * second.transition * first.noise;

  SmootherState out;
  out.mean = lambda * s0.mean + psi * s1.mean;
  const Mat2 mixed = lambda * c01 * psi.transpose();
  out.cov = lambda * s0.cov * lambda.transpose() + psi * s1.cov * psi.transpose() + mixed +
            mixed.transpose() + bridge;
  out.cov = 0.5 * (out.cov + out.cov.transpose());
  return out;
}

QueryResult SmoothedTrajectory::query(double t) const {
  QueryResult r;
  for (std::size_t a = 0; a < 3; ++a) {
    const SmootherState s = query_state(t, axis_from_index(a));
    r.omega[static_cast<Eigen::Index>(a)] = s.mean[0];
    r.var[static_cast<Eigen::Index>(a)] = s.cov(0, 0);
  }
  return r;
}

}  // namespace gyrosat
