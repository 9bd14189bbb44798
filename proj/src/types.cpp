#include "gyrosat/types.hpp"

#include <cmath>
#include <string>

namespace gyrosat {

char axis_name(Axis a) noexcept {
  switch (a) {
    case Axis::X:
      return 'x';
    case Axis::Y:
      return 'y';
    case Axis::Z:
      return 'z';
  }
  return '?';
}

std::optional<Axis> parse_axis(std::string_view s) noexcept {
  if (s == "x" || s == "X" || s == "0") return Axis::X;
  if (s == "y" || s == "Y" || s == "1") return Axis::Y;
  if (s == "z" || s == "Z" || s == "2") return Axis::Z;
  return std::nullopt;
}

std::string_view to_string(Source s) noexcept {
  switch (s) {
    case Source::Measured:
      return "measured";
    case Source::Recovered:
      return "recovered";
    case Source::Rejected:
      return "rejected";
    case Source::Smoothed:
      return "smoothed";
  }
  return "unknown";
}

std::optional<Source> parse_source(std::string_view s) noexcept {
  for (Source src : {Source::Measured, Source::Recovered, Source::Rejected, Source::Smoothed}) {
    if (s == to_string(src)) return src;
  }
  return std::nullopt;
}

RigConfig RigConfig::with_rails(const Vec3& gyro_sat) {
  RigConfig cfg;
  cfg.gyro_sat = gyro_sat;
  cfg.sat_margin = 0.02 * gyro_sat.minCoeff();
  return cfg;
}

void RigConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("invalid rig config: " + what); };
  if (!com_to_imu.allFinite()) fail("com_to_imu must be finite");
  if (!(com_to_imu.norm() > 0.0)) fail("com_to_imu must be nonzero");
  for (int i = 0; i < 3; ++i) {
    if (!(gyro_sat[i] > 0.0) || !std::isfinite(gyro_sat[i])) fail("gyro_sat must be positive");
  }
  if (!(gyro_noise_var > 0.0) || !std::isfinite(gyro_noise_var)) fail("gyro_noise_var must be > 0");
  if (!(estimate_var > 0.0) || !std::isfinite(estimate_var)) fail("estimate_var must be > 0");
  if (!(jerk_psd > 0.0) || !std::isfinite(jerk_psd)) fail("jerk_psd must be > 0");
  if (!(sat_margin >= 0.0)) fail("sat_margin must be >= 0");
  if (!(sat_margin < gyro_sat.minCoeff())) fail("sat_margin must be below min(gyro_sat)");
  if (!(r_min > 0.0)) fail("r_min must be > 0");
  if (accel_rail && !(*accel_rail > 0.0)) fail("accel_rail must be > 0 when set");
}

}  // namespace gyrosat
