#include "gyrosat/sim.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace gyrosat {
namespace {

using Vec4 = Eigen::Vector4d;

// Quaternion as (w, x, y, z) for the RK4 state.
Vec4 to_vec(const Quat& q) { return Vec4(q.w(), q.x(), q.y(), q.z()); }
Quat to_quat(const Vec4& v) { return Quat(v[0], v[1], v[2], v[3]); }

// dq/dt = 1/2 q (x) (0, w) with w in the body frame.
Vec4 quat_rate(const Vec4& q, const Vec3& w) {
  return 0.5 * Vec4(-q[1] * w[0] - q[2] * w[1] - q[3] * w[2],
                    q[0] * w[0] + q[2] * w[2] - q[3] * w[1],
                    q[0] * w[1] + q[3] * w[0] - q[1] * w[2],
                    q[0] * w[2] + q[1] * w[1] - q[2] * w[0]);
}

}  // namespace

void BodyModel::validate() const {
  if (!inertia.allFinite() || !com_to_imu.allFinite() || !gravity.allFinite()) {
    throw ConfigError("body model has non-finite values");
  }
  if (!inertia.isApprox(inertia.transpose(), 1e-12)) throw ConfigError("inertia must be symmetric");
  const Eigen::SelfAdjointEigenSolver<Mat3> es(inertia, Eigen::EigenvaluesOnly);
  const Vec3 l = es.eigenvalues();
  if (!(l.minCoeff() > 0.0)) throw ConfigError("inertia must be positive definite");
  const double tol = 1e-12 * l.maxCoeff();
  if (l[0] + l[1] < l[2] - tol || l[0] + l[2] < l[1] - tol || l[1] + l[2] < l[0] - tol) {
    throw ConfigError("inertia principal moments violate the triangle inequality");
  }
}

Forcing forcing_at(const std::vector<CollisionEvent>& events, double t) {
  Forcing f;
  for (const CollisionEvent& e : events) {
    if (e.active(t)) {
      f.omega_dot += e.delta_omega / e.duration;
      f.accel_world += e.delta_v / e.duration;
    }
  }
  return f;
}

Vec3 angular_acceleration(const BodyModel& body, const Vec3& omega, const Forcing& f) {
  const Vec3 momentum = body.inertia * omega;
  return body.inertia.ldlt().solve(momentum.cross(omega)) + f.omega_dot;
}

SimState step(const SimState& s, const BodyModel& body, double dt, const Forcing& f) {
  // Factor once per step; the inertia is constant.
  const Eigen::LDLT<Mat3> inv(body.inertia);
  auto wdot = [&](const Vec3& w) -> Vec3 {
    return inv.solve((body.inertia * w).cross(w)) + f.omega_dot;
  };

  const Vec4 q0 = to_vec(s.q);
  const Vec3 w0 = s.omega;
  const Vec4 kq1 = quat_rate(q0, w0);
  const Vec3 kw1 = wdot(w0);
  const Vec4 kq2 = quat_rate(q0 + 0.5 * dt * kq1, w0 + 0.5 * dt * kw1);
  const Vec3 kw2 = wdot(w0 + 0.5 * dt * kw1);
  const Vec4 kq3 = quat_rate(q0 + 0.5 * dt * kq2, w0 + 0.5 * dt * kw2);
  const Vec3 kw3 = wdot(w0 + 0.5 * dt * kw2);
  const Vec4 kq4 = quat_rate(q0 + dt * kq3, w0 + dt * kw3);
  const Vec3 kw4 = wdot(w0 + dt * kw3);

  SimState out;
  out.q = to_quat(q0 + dt / 6.0 * (kq1 + 2.0 * kq2 + 2.0 * kq3 + kq4)).normalized();
  out.omega = w0 + dt / 6.0 * (kw1 + 2.0 * kw2 + 2.0 * kw3 + kw4);
  const Vec3 a = body.gravity + f.accel_world;
  out.p = s.p + s.v * dt + 0.5 * a * dt * dt;
  out.v = s.v + a * dt;
  out.t = s.t + dt;
  return out;
}

ImuSample synthesize_imu(const SimState& state, const Vec3& omega_dot, const BodyModel& body,
                         const Vec3& com_accel_world) {
  const Vec3& w = state.omega;
  const Vec3& t = body.com_to_imu;
  const Vec3 com_proper = state.q.conjugate() * (com_accel_world - body.gravity);
  ImuSample s;
  s.t = state.t;
  s.gyro = w;
  s.accel = com_proper + omega_dot.cross(t) + w.cross(w.cross(t));
  return s;
}

ImuSample synthesize_imu(const SimState& state, const Vec3& omega_dot, const BodyModel& body,
                         bool in_freefall) {
  return synthesize_imu(state, omega_dot, body, in_freefall ? body.gravity : Vec3::Zero().eval());
}

double rotational_energy(const BodyModel& body, const Vec3& omega) {
  return 0.5 * omega.dot(body.inertia * omega);
}

double angular_momentum_norm(const BodyModel& body, const Vec3& omega) {
  return (body.inertia * omega).norm();
}

void ScenarioConfig::validate() const {
  body.validate();
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("duration must be > 0");
  if (!(sensor.sample_rate > 0.0)) throw ConfigError("sample_rate must be > 0");
  if (sensor.substeps < 1) throw ConfigError("substeps must be >= 1");
  if (!(sensor.gyro_noise_var >= 0.0) || !(sensor.accel_noise_var >= 0.0)) {
    throw ConfigError("noise variances must be >= 0");
  }
  if (!(sensor.gyro_sat.minCoeff() > 0.0)) throw ConfigError("gyro_sat must be > 0");
  if (sensor.accel_rail && !(*sensor.accel_rail > 0.0)) throw ConfigError("accel_rail must be > 0");
  if (!initial.omega.allFinite() || !initial.q.coeffs().allFinite() ||
      std::abs(initial.q.norm() - 1.0) > 1e-9) {
    throw ConfigError("initial state must have finite rates and a unit quaternion");
  }
  std::vector<CollisionEvent> sorted = collisions;
  std::sort(sorted.begin(), sorted.end(),
            [](const CollisionEvent& a, const CollisionEvent& b) { return a.t < b.t; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const CollisionEvent& e = sorted[i];
    if (!(e.duration > 0.0) || !std::isfinite(e.t) || !e.delta_omega.allFinite() ||
        !e.delta_v.allFinite()) {
      throw ConfigError("collision " + std::to_string(i) + " is invalid");
    }
    if (i > 0 && e.t < sorted[i - 1].end()) {
      throw ConfigError("collisions overlap at t = " + std::to_string(e.t));
    }
  }
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const double rate = cfg.sensor.sample_rate;
  const auto n_samples = static_cast<std::size_t>(std::floor(cfg.duration * rate + 1e-9)) + 1;

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double gyro_sd = std::sqrt(cfg.sensor.gyro_noise_var);
  const double accel_sd = std::sqrt(cfg.sensor.accel_noise_var);

  ScenarioResult out;
  out.truth.reserve(n_samples);
  out.measurements.reserve(n_samples);

  SimState state = cfg.initial;
  state.t = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double t_sample = static_cast<double>(i) / rate;
    state.t = t_sample;

    const Forcing f = forcing_at(cfg.collisions, t_sample);
    const Vec3 wdot = angular_acceleration(cfg.body, state.omega, f);
    ImuSample m = synthesize_imu(state, wdot, cfg.body, Vec3(cfg.body.gravity + f.accel_world));
    out.truth.push_back({t_sample, state.omega});

    if (gyro_sd > 0.0) {
      for (int a = 0; a < 3; ++a) m.gyro[a] += gyro_sd * normal(rng);
    }
    if (accel_sd > 0.0) {
      for (int a = 0; a < 3; ++a) m.accel[a] += accel_sd * normal(rng);
    }
    for (int a = 0; a < 3; ++a) {
      m.gyro[a] = std::clamp(m.gyro[a], -cfg.sensor.gyro_sat[a], cfg.sensor.gyro_sat[a]);
      if (cfg.sensor.accel_rail) {
        m.accel[a] = std::clamp(m.accel[a], -*cfg.sensor.accel_rail, *cfg.sensor.accel_rail);
      }
    }
    out.measurements.push_back(m);

    if (i + 1 == n_samples) break;

    // Integrate to the next sample, splitting substeps at collision boundaries
    // so the forcing is constant over each RK4 step.
    const double t_next = static_cast<double>(i + 1) / rate;
    std::vector<double> breaks;
    const int sub = cfg.sensor.substeps;
    for (int k = 0; k <= sub; ++k) {
      breaks.push_back(t_sample + (t_next - t_sample) * static_cast<double>(k) / sub);
    }
    for (const CollisionEvent& e : cfg.collisions) {
      if (e.t > t_sample && e.t < t_next) breaks.push_back(e.t);
      if (e.end() > t_sample && e.end() < t_next) breaks.push_back(e.end());
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
      const double h = breaks[k + 1] - breaks[k];
      if (!(h > 0.0)) continue;
      const Forcing fk = forcing_at(cfg.collisions, 0.5 * (breaks[k] + breaks[k + 1]));
      state = step(state, cfg.body, h, fk);
    }
  }
  return out;
}

ScenarioConfig make_tumble(std::uint64_t seed) {
  // Scenario parameters use their own stream so noise draws do not shift them.
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  ScenarioConfig cfg;
  cfg.seed = seed;
  cfg.body.inertia = Eigen::Vector3d(uniform(0.10, 0.14), uniform(0.12, 0.16), uniform(0.14, 0.20))
                         .asDiagonal();

  const int dominant = std::uniform_int_distribution<int>(0, 2)(rng);
  Vec3 dir;
  for (int a = 0; a < 3; ++a) dir[a] = a == dominant ? 1.0 : uniform(-0.3, 0.3);
  if (uniform(0.0, 1.0) < 0.5) dir[dominant] = -1.0;
  cfg.initial.omega = uniform(8.0, 19.0) * dir.normalized();
  cfg.initial.q = Quat(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)).normalized();

  cfg.duration = uniform(3.0, 6.0);
  const int n_events = std::uniform_int_distribution<int>(3, 8)(rng);
  const double slot = cfg.duration / n_events;
  for (int k = 0; k < n_events; ++k) {
    CollisionEvent e;
    e.duration = uniform(0.015, 0.04);
    e.t = k * slot + uniform(0.2, 0.8) * (slot - e.duration);
    Vec3 dw(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
    e.delta_omega = uniform(0.5, 4.0) * dw.normalized();
    Vec3 dv(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
    e.delta_v = uniform(0.5, 2.5) * dv.normalized();
    cfg.collisions.push_back(e);
  }
  return cfg;
}

}  // namespace gyrosat
