#pragma once

// Data-parallel inner loops of the pipeline. Every kernel has a scalar
// reference and an AVX2 variant; both evaluate the same expression tree in the
// same order, so results agree bit-for-bit (the build disables FP contraction).

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace gyrosat::simd {

enum class Level : std::uint8_t { Scalar, Avx2 };

std::string_view to_string(Level level) noexcept;

/// Status codes written by recover_centripetal.
enum class CentripetalStatus : std::uint8_t { Recovered = 0, Clamped = 1, NegativeRadicand = 2 };

/// Structure-of-arrays input to recover_centripetal. All arrays hold `n` elements.
///
/// The saturated reading itself is never passed in: callers resolve it to a
/// sign (+1 / -1) beforehand, so the kernel cannot depend on the clipped value.
struct CentripetalBatch {
  std::size_t n = 0;
  const double* ax = nullptr;  // proper acceleration, body frame
  const double* ay = nullptr;
  const double* az = nullptr;
  const double* xx = nullptr;  // unit vector from the IMU toward the rotation axis
  const double* xy = nullptr;
  const double* xz = nullptr;
  const double* lever = nullptr;  // lever-arm length [m]
  const double* u1 = nullptr;     // the two unsaturated gyro readings
  const double* u2 = nullptr;
  const double* floor = nullptr;  // saturation floor (rail minus margin)
  const double* sign = nullptr;   // +1 or -1
  double* value = nullptr;        // out; NaN where rejected
  std::uint8_t* status = nullptr;  // out; CentripetalStatus
};

/// Per-knot Gaussian over [omega, omega_dot] for the three axes in lanes 0..2.
/// Lane 3 is padding. Covariances are stored as their three unique entries.
struct alignas(32) GaussLanes {
  std::array<double, 4> m0{};
  std::array<double, 4> m1{};
  std::array<double, 4> p00{};
  std::array<double, 4> p01{};
  std::array<double, 4> p11{};
};

/// Cov(x_k, x_{k+1}) of the smoothed posterior, row-major 2x2 per lane.
struct alignas(32) CrossLanes {
  std::array<double, 4> c00{};
  std::array<double, 4> c01{};
  std::array<double, 4> c10{};
  std::array<double, 4> c11{};
};

/// Scalar observation of omega per lane; `present` is 1.0 or 0.0.
struct alignas(32) MeasurementLanes {
  std::array<double, 4> y{};
  std::array<double, 4> r{1.0, 1.0, 1.0, 1.0};
  std::array<double, 4> present{};
};

struct KernelTable {
  Level level;

  /// mask[i] bit a is set iff |g_a[i]| >= floor[a].
  void (*saturation_mask)(std::size_t n, const double* gx, const double* gy, const double* gz,
                          const double* floor3, std::uint8_t* mask);

  void (*recover_centripetal)(const CentripetalBatch& batch);

  /// Forward Kalman pass under the white-noise-on-jerk prior with PSD `q`.
  /// `filt[0]` is the prior at the first knot and must be set on entry.
  /// dt[k] = t[k] - t[k-1] for k >= 1; dt[0] is ignored.
  void (*kf_forward)(std::size_t n, const double* dt, const MeasurementLanes* meas, double q,
                     GaussLanes* pred, GaussLanes* filt);

  /// Rauch-Tung-Striebel backward pass. Writes smooth[0..n) and cross[0..n-1).
  /// The gain is formed as Phi^-1 (I - Q P^-1) and covariances as
  /// (I - G Phi) F (I - G Phi)^T + G (Q + S) G^T, which avoids cancellation
  /// under diffuse priors.
  void (*rts_backward)(std::size_t n, const double* dt, double q, const GaussLanes* pred,
                       const GaussLanes* filt, GaussLanes* smooth, CrossLanes* cross);
};

/// True if this build contains `level` and the running CPU can execute it.
bool supported(Level level) noexcept;

/// Kernel table for `level`. Throws std::invalid_argument if not supported.
const KernelTable& kernels(Level level);

/// Best supported table, picked once per process. Setting the environment
/// variable GYROSAT_SIMD=scalar forces the scalar reference.
const KernelTable& active_kernels();

}  // namespace gyrosat::simd
