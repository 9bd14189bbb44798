#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gyrosat {

using Vec3 = Eigen::Vector3d;

enum class Axis : std::uint8_t { X = 0, Y = 1, Z = 2 };

inline constexpr std::size_t index(Axis a) noexcept { return static_cast<std::size_t>(a); }
inline constexpr Axis axis_from_index(std::size_t i) noexcept { return static_cast<Axis>(i); }
char axis_name(Axis a) noexcept;
std::optional<Axis> parse_axis(std::string_view s) noexcept;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input data (malformed files, non-finite values, inconsistent streams).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Geometry for which free-fall recovery is undefined.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// One timestamped body-frame IMU reading. `accel` is proper acceleration.
struct ImuSample {
  double t = 0.0;
  Vec3 gyro = Vec3::Zero();
  Vec3 accel = Vec3::Zero();
};

/// Provenance of one axis of a fused angular-velocity estimate.
enum class Source : std::uint8_t { Measured, Recovered, Rejected, Smoothed };

std::string_view to_string(Source s) noexcept;
std::optional<Source> parse_source(std::string_view s) noexcept;

/// Fused angular velocity. A Rejected axis carries no usable omega value.
struct VelocityEstimate {
  double t = 0.0;
  Vec3 omega = Vec3::Zero();
  Vec3 var = Vec3::Ones();
  std::array<Source, 3> source{Source::Measured, Source::Measured, Source::Measured};

  bool usable(Axis a) const noexcept { return source[index(a)] != Source::Rejected; }
};

/// Rig geometry, sensor limits and noise model shared by detection, recovery and smoothing.
struct RigConfig {
  Vec3 com_to_imu = Vec3(0.1, 0.05, 0.08);  ///< COM -> IMU offset, body frame [m]
  Vec3 gyro_sat = Vec3::Constant(10.5);     ///< per-axis gyro rail [rad/s]
  double gyro_noise_var = 2.74e-5;          ///< variance of unsaturated gyro readings [(rad/s)^2]
  double estimate_var = 3.65;               ///< variance of recovered readings [(rad/s)^2]
  double jerk_psd = 1e6;                    ///< white-noise PSD of angular jerk
  double sat_margin = 0.21;                 ///< detection margin below the rail [rad/s]
  double r_min = 0.01;                      ///< smallest usable lever arm [m]
  std::optional<double> accel_rail;         ///< |accel| at or above this is treated as clipped
  bool frozen_axis = false;                 ///< freeze the rotation axis at window entry
  bool bootstrap_axis = false;              ///< seed windows without a predecessor from their first sample

  /// Config for the given rails with the default 2% margin.
  static RigConfig with_rails(const Vec3& gyro_sat);

  double saturation_floor(Axis a) const noexcept { return gyro_sat[index(a)] - sat_margin; }

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;
};

}  // namespace gyrosat
