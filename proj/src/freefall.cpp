#include "gyrosat/freefall.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace gyrosat {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double resolve_sign(double clipped, double fallback) noexcept {
  if (clipped > 0.0) return 1.0;
  if (clipped < 0.0) return -1.0;
  return fallback < 0.0 ? -1.0 : 1.0;
}

bool accel_clipped(const ImuSample& s, const RigConfig& cfg) noexcept {
  return cfg.accel_rail && s.accel.cwiseAbs().maxCoeff() >= *cfg.accel_rail;
}

RecoveryStatus from_kernel(std::uint8_t status) noexcept {
  switch (static_cast<simd::CentripetalStatus>(status)) {
    case simd::CentripetalStatus::Recovered:
      return RecoveryStatus::Recovered;
    case simd::CentripetalStatus::Clamped:
      return RecoveryStatus::Clamped;
    case simd::CentripetalStatus::NegativeRadicand:
      break;
  }
  return RecoveryStatus::NegativeRadicand;
}

AxisRecovery rejected(RecoveryStatus status) noexcept { return {Source::Rejected, kNaN, status}; }

std::optional<Vec3> unit_axis(const Vec3& omega) {
  const double n = omega.norm();
  if (!(n > 0.0) || !std::isfinite(n)) return std::nullopt;
  return omega / n;
}

/// The two gyro axes that are not `a`, in cyclic order.
std::pair<std::size_t, std::size_t> other_axes(Axis a) noexcept {
  const std::size_t i = index(a);
  return {(i + 1) % 3, (i + 2) % 3};
}

// Batch of samples sharing one rotational frame, fed to the centripetal kernel.
struct FrameBatch {
  std::vector<double> ax, ay, az, xx, xy, xz, lever, u1, u2, floor, sign, value;
  std::vector<std::uint8_t> status;
  std::vector<std::size_t> sample_index;

  void push(const ImuSample& s, Axis axis, const RotationalFrame& frame, double lever_norm,
            double floor_value, double sign_value, std::size_t idx) {
    const auto [o1, o2] = other_axes(axis);
    ax.push_back(s.accel.x());
    ay.push_back(s.accel.y());
    az.push_back(s.accel.z());
    xx.push_back(frame.x_hat.x());
    xy.push_back(frame.x_hat.y());
    xz.push_back(frame.x_hat.z());
    lever.push_back(lever_norm);
    u1.push_back(s.gyro[static_cast<Eigen::Index>(o1)]);
    u2.push_back(s.gyro[static_cast<Eigen::Index>(o2)]);
    floor.push_back(floor_value);
    sign.push_back(sign_value);
    sample_index.push_back(idx);
  }

  void run(const simd::KernelTable& kernels) {
    const std::size_t n = ax.size();
    value.assign(n, 0.0);
    status.assign(n, 0);
    simd::CentripetalBatch b;
    b.n = n;
    b.ax = ax.data();
    b.ay = ay.data();
    b.az = az.data();
    b.xx = xx.data();
    b.xy = xy.data();
    b.xz = xz.data();
    b.lever = lever.data();
    b.u1 = u1.data();
    b.u2 = u2.data();
    b.floor = floor.data();
    b.sign = sign.data();
    b.value = value.data();
    b.status = status.data();
    kernels.recover_centripetal(b);
  }
};

VelocityEstimate measured_estimate(const ImuSample& s, const RigConfig& cfg) {
  VelocityEstimate e;
  e.t = s.t;
  e.omega = s.gyro;
  e.var = Vec3::Constant(cfg.gyro_noise_var);
  e.source = {Source::Measured, Source::Measured, Source::Measured};
  return e;
}

void apply(VelocityEstimate& est, Axis axis, const AxisRecovery& rec, const RigConfig& cfg,
           RecoveryCounts& counts) {
  const std::size_t a = index(axis);
  est.source[a] = rec.source;
  est.omega[static_cast<Eigen::Index>(a)] = rec.value;
  // Rejected axes keep a nominal variance; downstream ignores them.
  est.var[static_cast<Eigen::Index>(a)] = cfg.estimate_var;
  ++counts.by_status[static_cast<std::size_t>(rec.status)];
}

void reject_all(VelocityEstimate& est, std::uint8_t axes, RecoveryStatus why, const RigConfig& cfg,
                RecoveryCounts& counts) {
  for (std::size_t a = 0; a < 3; ++a) {
    if (axes & (1u << a)) apply(est, axis_from_index(a), rejected(why), cfg, counts);
  }
}

std::vector<std::uint8_t> window_mask(std::size_t n, std::span<const SaturationWindow> windows) {
  std::vector<std::uint8_t> mask(n, 0);
  for (const SaturationWindow& w : windows) {
    if (w.end > n || w.begin > w.end) throw DataError("saturation window outside the stream");
    for (std::size_t i = w.begin; i < w.end; ++i) mask[i] |= static_cast<std::uint8_t>(1u << index(w.axis));
  }
  return mask;
}

int single_axis(std::uint8_t m) noexcept {
  switch (m) {
    case 1:
      return 0;
    case 2:
      return 1;
    case 4:
      return 2;
    default:
      return -1;
  }
}

AxisRecovery recover_axis_nothrow(const ImuSample& s, Axis axis, const Vec3& e, const RigConfig& cfg,
                                  double fallback_sign, const simd::KernelTable& kernels) {
  try {
    return recover_axis(s, axis, e, cfg, fallback_sign, kernels);
  } catch (const MultiAxisSaturation&) {
    return rejected(RecoveryStatus::MultiAxis);
  } catch (const GeometryError&) {
    return rejected(RecoveryStatus::DegenerateLever);
  }
}

// Without an earlier estimate, start from the clipped reading's own direction and
// refine it with the recovered magnitude a few times.
std::optional<Vec3> bootstrap_axis(const ImuSample& s, Axis axis, const RigConfig& cfg,
                                   const simd::KernelTable& kernels) {
  constexpr int kIterations = 4;
  Vec3 w = s.gyro;
  const auto a = static_cast<Eigen::Index>(index(axis));
  for (int it = 0; it < kIterations; ++it) {
    const std::optional<Vec3> e = unit_axis(w);
    if (!e) return std::nullopt;
    const AxisRecovery rec = recover_axis_nothrow(s, axis, *e, cfg, w[a], kernels);
    if (rec.source != Source::Recovered) return it == 0 ? std::nullopt : e;
    w[a] = rec.value;
  }
  return unit_axis(w);
}

// The rotation axis follows each new fused estimate.
RecoveredStream recover_tracking(std::span<const ImuSample> samples,
                                 const std::vector<std::uint8_t>& mask, const RigConfig& cfg,
                                 const simd::KernelTable& kernels) {
  RecoveredStream out;
  out.estimates.reserve(samples.size());
  std::optional<Vec3> last_valid;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const ImuSample& s = samples[i];
    VelocityEstimate est = measured_estimate(s, cfg);
    const std::uint8_t m = mask[i];
    if (m == 0) {
      ++out.counts.measured;
      last_valid = s.gyro;
      out.estimates.push_back(est);
      continue;
    }
    const int a = single_axis(m);
    if (a < 0) {
      reject_all(est, m, RecoveryStatus::MultiAxis, cfg, out.counts);
      out.estimates.push_back(est);
      continue;
    }
    const Axis axis = axis_from_index(static_cast<std::size_t>(a));
    std::optional<Vec3> e;
    if (last_valid) {
      e = unit_axis(*last_valid);
    } else if (cfg.bootstrap_axis) {
      e = bootstrap_axis(s, axis, cfg, kernels);
    }
    AxisRecovery rec = rejected(RecoveryStatus::NoPriorAxis);
    if (e) {
      const double fallback = last_valid ? (*last_valid)[a] : s.gyro[a];
      rec = recover_axis_nothrow(s, axis, *e, cfg, fallback, kernels);
    }
    apply(est, axis, rec, cfg, out.counts);
    if (rec.source == Source::Recovered) last_valid = est.omega;
    out.estimates.push_back(est);
  }
  return out;
}

// The rotation axis is frozen at window entry; each window is one kernel batch.
RecoveredStream recover_frozen(std::span<const ImuSample> samples,
                               std::span<const SaturationWindow> windows,
                               const std::vector<std::uint8_t>& mask, const RigConfig& cfg,
                               const simd::KernelTable& kernels) {
  RecoveredStream out;
  out.estimates.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out.estimates.push_back(measured_estimate(samples[i], cfg));
    const std::uint8_t m = mask[i];
    if (m == 0) {
      ++out.counts.measured;
    } else if (single_axis(m) < 0) {
      reject_all(out.estimates.back(), m, RecoveryStatus::MultiAxis, cfg, out.counts);
    }
  }

  for (const SaturationWindow& w : windows) {
    const Axis axis = w.axis;
    const std::uint8_t bit = static_cast<std::uint8_t>(1u << index(axis));
    std::optional<std::size_t> seed;
    for (std::size_t j = w.begin; j-- > 0;) {
      if (mask[j] == 0) {
        seed = j;
        break;
      }
    }
    std::optional<Vec3> e;
    if (seed) {
      e = unit_axis(samples[*seed].gyro);
    } else if (cfg.bootstrap_axis && mask[w.begin] == bit) {
      e = bootstrap_axis(samples[w.begin], axis, cfg, kernels);
    }
    std::optional<LeverArm> lever;
    if (e) {
      try {
        lever = lever_arm(cfg.com_to_imu, *e, cfg.r_min);
      } catch (const GeometryError&) {
      }
    }

    FrameBatch batch;
    const RotationalFrame frame = lever ? rotational_frame(*e, *lever) : RotationalFrame{};
    const double fallback = samples[seed ? *seed : w.begin].gyro[static_cast<Eigen::Index>(index(axis))];
    for (std::size_t i = w.begin; i < w.end; ++i) {
      if (mask[i] != bit) continue;  // multi-axis samples were rejected above
      VelocityEstimate& est = out.estimates[i];
      if (!e) {
        apply(est, axis, rejected(RecoveryStatus::NoPriorAxis), cfg, out.counts);
      } else if (!lever) {
        apply(est, axis, rejected(RecoveryStatus::DegenerateLever), cfg, out.counts);
      } else if (accel_clipped(samples[i], cfg)) {
        apply(est, axis, rejected(RecoveryStatus::AccelClipped), cfg, out.counts);
      } else {
        const double clipped = samples[i].gyro[static_cast<Eigen::Index>(index(axis))];
        batch.push(samples[i], axis, frame, lever->magnitude, cfg.saturation_floor(axis),
                   resolve_sign(clipped, fallback), i);
      }
    }
    if (batch.ax.empty()) continue;
    batch.run(kernels);
    for (std::size_t k = 0; k < batch.sample_index.size(); ++k) {
      const RecoveryStatus st = from_kernel(batch.status[k]);
      const AxisRecovery rec = st == RecoveryStatus::NegativeRadicand
                                   ? rejected(st)
                                   : AxisRecovery{Source::Recovered, batch.value[k], st};
      apply(out.estimates[batch.sample_index[k]], axis, rec, cfg, out.counts);
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(RecoveryStatus s) noexcept {
  switch (s) {
    case RecoveryStatus::Recovered:
      return "recovered";
    case RecoveryStatus::Clamped:
      return "clamped";
    case RecoveryStatus::NegativeRadicand:
      return "negative_radicand";
    case RecoveryStatus::AccelClipped:
      return "accel_clipped";
    case RecoveryStatus::MultiAxis:
      return "multi_axis";
    case RecoveryStatus::DegenerateLever:
      return "degenerate_lever";
    case RecoveryStatus::NoPriorAxis:
      return "no_prior_axis";
  }
  return "unknown";
}

LeverArm lever_arm(const Vec3& com_to_imu, const Vec3& e, double r_min) {
  if (!e.allFinite() || std::abs(e.norm() - 1.0) > 1e-6) {
    throw std::invalid_argument("rotation axis must be a unit vector");
  }
  LeverArm out;
  out.r = com_to_imu.dot(e) * e - com_to_imu;
  out.magnitude = out.r.norm();
  if (!(out.magnitude >= r_min)) {
    throw GeometryError("degenerate lever arm: |r| = " + std::to_string(out.magnitude) +
                        " m is below " + std::to_string(r_min) + " m");
  }
  return out;
}

RotationalFrame rotational_frame(const Vec3& e, const LeverArm& lever) {
  if (!(lever.magnitude > 0.0)) throw GeometryError("degenerate lever arm");
  RotationalFrame f;
  f.z_hat = e.normalized();
  // Remove any residual component along e so the triad is orthonormal to rounding.
  const Vec3 x = lever.r - lever.r.dot(f.z_hat) * f.z_hat;
  f.x_hat = x.normalized();
  f.y_hat = f.z_hat.cross(f.x_hat);
  return f;
}

AxisRecovery recover_axis(const ImuSample& sample, Axis axis, const Vec3& e_prev,
                          const RigConfig& cfg, double fallback_sign,
                          const simd::KernelTable& kernels) {
  for (std::size_t o = 0; o < 3; ++o) {
    if (o == index(axis)) continue;
    const Axis other = axis_from_index(o);
    if (std::abs(sample.gyro[static_cast<Eigen::Index>(o)]) >= cfg.saturation_floor(other)) {
      throw MultiAxisSaturation(std::string("more than one gyro axis saturated (") + axis_name(axis) +
                          " and " + axis_name(other) + ")");
    }
  }
  const LeverArm lever = lever_arm(cfg.com_to_imu, e_prev, cfg.r_min);
  if (accel_clipped(sample, cfg)) return rejected(RecoveryStatus::AccelClipped);
  const RotationalFrame frame = rotational_frame(e_prev, lever);

  FrameBatch batch;
  const double clipped = sample.gyro[static_cast<Eigen::Index>(index(axis))];
  batch.push(sample, axis, frame, lever.magnitude, cfg.saturation_floor(axis),
             resolve_sign(clipped, fallback_sign), 0);
  batch.run(kernels);
  const RecoveryStatus st = from_kernel(batch.status[0]);
  if (st == RecoveryStatus::NegativeRadicand) return rejected(st);
  return {Source::Recovered, batch.value[0], st};
}

RecoveredStream recover_stream(std::span<const ImuSample> samples,
                               std::span<const SaturationWindow> windows, const RigConfig& cfg,
                               const simd::KernelTable& kernels) {
  const std::vector<std::uint8_t> mask = window_mask(samples.size(), windows);
  if (cfg.frozen_axis) return recover_frozen(samples, windows, mask, cfg, kernels);
  return recover_tracking(samples, mask, cfg, kernels);
}

}  // namespace gyrosat
