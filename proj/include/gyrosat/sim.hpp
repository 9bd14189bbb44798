#pragma once

// Ground-truth simulator: a torque-free rigid body in free fall, interrupted by
// short finite-duration collisions, observed by a noisy clipped IMU mounted
// away from the centre of mass.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <optional>
#include <vector>

#include "gyrosat/types.hpp"

namespace gyrosat {

using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

struct BodyModel {
  Mat3 inertia = Eigen::Vector3d(0.12, 0.14, 0.17).asDiagonal();  ///< body frame [kg m^2]
  Vec3 com_to_imu = Vec3(0.1, 0.05, 0.08);                         ///< [m]
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);                            ///< world frame [m/s^2]

  /// Throws ConfigError unless the inertia is symmetric positive definite and
  /// its principal moments satisfy the triangle inequalities.
  void validate() const;
};

struct SimState {
  Quat q = Quat::Identity();  ///< body -> world
  Vec3 omega = Vec3::Zero();  ///< body frame [rad/s]
  Vec3 p = Vec3::Zero();      ///< COM position, world frame
  Vec3 v = Vec3::Zero();      ///< COM velocity, world frame
  double t = 0.0;
};

/// Constant-rate velocity change spread over `duration` seconds starting at `t`.
struct CollisionEvent {
  double t = 0.0;
  Vec3 delta_omega = Vec3::Zero();  ///< body frame [rad/s]
  Vec3 delta_v = Vec3::Zero();      ///< world frame [m/s]
  double duration = 0.02;

  double end() const noexcept { return t + duration; }
  bool active(double time) const noexcept { return time >= t && time < end(); }
};

/// External inputs held constant over one integration step.
struct Forcing {
  Vec3 omega_dot = Vec3::Zero();    ///< added to the Euler-equation term, body frame
  Vec3 accel_world = Vec3::Zero();  ///< non-gravitational COM acceleration
};

Forcing forcing_at(const std::vector<CollisionEvent>& events, double t);

/// Torque-free Euler equations plus forcing: I^-1 ((I w) x w) + f.
Vec3 angular_acceleration(const BodyModel& body, const Vec3& omega, const Forcing& f = {});

/// Advances by dt: RK4 on attitude and body rates, exact ballistic translation.
SimState step(const SimState& state, const BodyModel& body, double dt, const Forcing& f = {});

/// Noiseless, unclipped IMU reading. `com_accel_world` is the coordinate
/// acceleration of the COM (equal to gravity in free fall).
ImuSample synthesize_imu(const SimState& state, const Vec3& omega_dot, const BodyModel& body,
                         const Vec3& com_accel_world);
ImuSample synthesize_imu(const SimState& state, const Vec3& omega_dot, const BodyModel& body,
                         bool in_freefall);

double rotational_energy(const BodyModel& body, const Vec3& omega);
double angular_momentum_norm(const BodyModel& body, const Vec3& omega);

struct SensorConfig {
  double sample_rate = 100.0;       ///< [Hz]
  double gyro_noise_var = 2.74e-5;  ///< [(rad/s)^2]
  double accel_noise_var = 1e-3;    ///< [(m/s^2)^2]
  Vec3 gyro_sat = Vec3::Constant(10.5);
  std::optional<double> accel_rail;
  /// Integration substeps per sample interval.
  int substeps = 10;
};

struct ScenarioConfig {
  BodyModel body;
  SimState initial;
  std::vector<CollisionEvent> collisions;
  double duration = 5.0;
  SensorConfig sensor;
  std::uint64_t seed = 0;

  /// Throws ConfigError on bad values or overlapping collisions.
  void validate() const;
};

struct TruthSample {
  double t = 0.0;
  Vec3 omega = Vec3::Zero();
};

struct ScenarioResult {
  std::vector<TruthSample> truth;
  std::vector<ImuSample> measurements;
};

/// Deterministic for a given config (including seed).
ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// Default randomized tumble: |omega_0| in [8, 19] rad/s about a dominant body
/// axis, 3-8 collisions over a 3-6 s run.
ScenarioConfig make_tumble(std::uint64_t seed);

}  // namespace gyrosat
