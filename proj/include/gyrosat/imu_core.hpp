#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gyrosat/simd/kernels.hpp"
#include "gyrosat/types.hpp"

namespace gyrosat {

/// Maximal run of samples on one gyro axis at or beyond the saturation floor.
struct SaturationWindow {
  Axis axis = Axis::X;
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t begin = 0;  ///< first sample index
  std::size_t end = 0;    ///< one past the last sample index
  /// Some sample in the window also has another axis saturated.
  bool multi_axis = false;

  std::size_t size() const noexcept { return end - begin; }
  bool contains_index(std::size_t i) const noexcept { return i >= begin && i < end; }
  bool contains_time(double t) const noexcept { return t >= t_start && t <= t_end; }
};

/// Sorts by time, collapses exact duplicate timestamps (last one wins) and
/// rejects non-finite fields. Throws DataError on empty input or bad values.
std::vector<ImuSample> normalize_stream(std::vector<ImuSample> samples);

/// Per-sample bit mask of saturated axes (bit 0 = x, 1 = y, 2 = z).
std::vector<std::uint8_t> saturation_mask(std::span<const ImuSample> samples, const RigConfig& cfg,
                                          const simd::KernelTable& kernels = simd::active_kernels());

/// Windows ordered by first sample, then axis.
std::vector<SaturationWindow> detect_saturation(
    std::span<const ImuSample> samples, const RigConfig& cfg,
    const simd::KernelTable& kernels = simd::active_kernels());

}  // namespace gyrosat
