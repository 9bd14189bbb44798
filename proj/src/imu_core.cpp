#include "gyrosat/imu_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace gyrosat {

std::vector<ImuSample> normalize_stream(std::vector<ImuSample> samples) {
  if (samples.empty()) throw DataError("empty stream");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const ImuSample& s = samples[i];
    if (!std::isfinite(s.t) || !s.gyro.allFinite() || !s.accel.allFinite()) {
      throw DataError("non-finite value in sample " + std::to_string(i));
    }
  }
  // Stable sort keeps input order among equal timestamps, so the last one wins below.
  std::stable_sort(samples.begin(), samples.end(),
                   [](const ImuSample& a, const ImuSample& b) { return a.t < b.t; });
  std::vector<ImuSample> out;
  out.reserve(samples.size());
  for (const ImuSample& s : samples) {
    if (!out.empty() && out.back().t == s.t) {
      out.back() = s;
    } else {
      out.push_back(s);
    }
  }
  return out;
}

std::vector<std::uint8_t> saturation_mask(std::span<const ImuSample> samples, const RigConfig& cfg,
                                          const simd::KernelTable& kernels) {
  const std::size_t n = samples.size();
  std::vector<double> gx(n), gy(n), gz(n);
  for (std::size_t i = 0; i < n; ++i) {
    gx[i] = samples[i].gyro.x();
    gy[i] = samples[i].gyro.y();
    gz[i] = samples[i].gyro.z();
  }
  const std::array<double, 3> floor{cfg.saturation_floor(Axis::X), cfg.saturation_floor(Axis::Y),
                                    cfg.saturation_floor(Axis::Z)};
  std::vector<std::uint8_t> mask(n);
  kernels.saturation_mask(n, gx.data(), gy.data(), gz.data(), floor.data(), mask.data());
  return mask;
}

std::vector<SaturationWindow> detect_saturation(std::span<const ImuSample> samples,
                                                const RigConfig& cfg,
                                                const simd::KernelTable& kernels) {
  const std::vector<std::uint8_t> mask = saturation_mask(samples, cfg, kernels);
  std::vector<SaturationWindow> windows;
  for (std::size_t a = 0; a < 3; ++a) {
    const std::uint8_t bit = static_cast<std::uint8_t>(1u << a);
    const std::uint8_t others = static_cast<std::uint8_t>(0x7u & ~bit);
    std::size_t i = 0;
    while (i < mask.size()) {
      if ((mask[i] & bit) == 0) {
        ++i;
        continue;
      }
      SaturationWindow w;
      w.axis = axis_from_index(a);
      w.begin = i;
      while (i < mask.size() && (mask[i] & bit) != 0) {
        w.multi_axis = w.multi_axis || (mask[i] & others) != 0;
        ++i;
      }
      w.end = i;
      w.t_start = samples[w.begin].t;
      w.t_end = samples[w.end - 1].t;
      windows.push_back(w);
    }
  }
  std::sort(windows.begin(), windows.end(), [](const SaturationWindow& a, const SaturationWindow& b) {
    return a.begin != b.begin ? a.begin < b.begin : a.axis < b.axis;
  });
  return windows;
}

}  // namespace gyrosat
