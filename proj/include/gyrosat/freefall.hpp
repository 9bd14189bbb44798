#pragma once

// Recovery of a clipped gyro axis from the centripetal acceleration seen by the
// accelerometer while the rig is in free fall.
//
// With the IMU at offset t from the centre of mass and the body spinning at
// omega about the unit axis e through the COM, the lever arm from the IMU to
// the axis is r = (t.e)e - t. In free fall the proper acceleration at the IMU
// is purely rotational, and its component along r/|r| is |omega|^2 |r|. Given
// the two unclipped gyro readings, the clipped one follows as
//
//     omega_sat^2 = a_r / |r| - omega_u1^2 - omega_u2^2,
//
// taking the sign from the clipped reading and never returning a magnitude
// below the rail. A negative right-hand side is rejected outright.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "gyrosat/imu_core.hpp"
#include "gyrosat/simd/kernels.hpp"
#include "gyrosat/types.hpp"

namespace gyrosat {

/// Raised when a sample has more than one gyro axis saturated.
class MultiAxisSaturation : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

struct LeverArm {
  Vec3 r = Vec3::Zero();  ///< IMU -> rotation axis, orthogonal to the axis [m]
  double magnitude = 0.0;
};

/// Orthonormal right-handed frame at the IMU: x toward the axis, z along it.
struct RotationalFrame {
  Vec3 x_hat = Vec3::UnitX();
  Vec3 y_hat = Vec3::UnitY();
  Vec3 z_hat = Vec3::UnitZ();
};

/// r = (t.e)e - t. Throws GeometryError("degenerate lever arm") when |r| < r_min
/// and std::invalid_argument when e is not unit length within 1e-6.
LeverArm lever_arm(const Vec3& com_to_imu, const Vec3& e, double r_min = 0.01);

RotationalFrame rotational_frame(const Vec3& e, const LeverArm& lever);

enum class RecoveryStatus : std::uint8_t {
  Recovered,         ///< magnitude from the accelerometer
  Clamped,           ///< magnitude raised to the saturation floor
  NegativeRadicand,  ///< rejected
  AccelClipped,      ///< rejected: accelerometer at its rail
  MultiAxis,         ///< rejected: more than one gyro axis saturated
  DegenerateLever,   ///< rejected: IMU (nearly) on the rotation axis
  NoPriorAxis,       ///< rejected: no earlier estimate to take the axis from
};

std::string_view to_string(RecoveryStatus s) noexcept;

struct AxisRecovery {
  Source source = Source::Rejected;  ///< Recovered or Rejected
  double value = 0.0;                ///< NaN when rejected
  RecoveryStatus status = RecoveryStatus::NegativeRadicand;
};

/// Recovers the saturated component `axis` of one sample, taking the rotation
/// axis from the previous estimate `e_prev`. `fallback_sign` is used only if the
/// clipped reading is exactly zero.
///
/// Throws MultiAxisSaturation if another axis of the sample is also saturated
/// and GeometryError if the lever arm is degenerate.
AxisRecovery recover_axis(const ImuSample& sample, Axis axis, const Vec3& e_prev,
                          const RigConfig& cfg, double fallback_sign = 1.0,
                          const simd::KernelTable& kernels = simd::active_kernels());

struct RecoveryCounts {
  std::size_t measured = 0;
  std::array<std::size_t, 7> by_status{};  ///< indexed by RecoveryStatus

  std::size_t count(RecoveryStatus s) const noexcept {
    return by_status[static_cast<std::size_t>(s)];
  }
};

struct RecoveredStream {
  std::vector<VelocityEstimate> estimates;
  RecoveryCounts counts;
};

/// Fuses the gyro stream with accelerometer-based recovery inside saturation
/// windows. Timestamps and ordering of `samples` are preserved exactly.
/// A window with no earlier estimate is rejected as NoPriorAxis, unless
/// cfg.bootstrap_axis is set: then the rotation axis comes from the window's
/// first sample, refined with its recovered magnitude.
RecoveredStream recover_stream(std::span<const ImuSample> samples,
                               std::span<const SaturationWindow> windows, const RigConfig& cfg,
                               const simd::KernelTable& kernels = simd::active_kernels());

}  // namespace gyrosat
