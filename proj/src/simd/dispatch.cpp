#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_internal.hpp"

namespace gyrosat::simd {

std::string_view to_string(Level level) noexcept {
  switch (level) {
    case Level::Scalar:
      return "scalar";
    case Level::Avx2:
      return "avx2";
  }
  return "unknown";
}

namespace {

constexpr KernelTable kScalar{Level::Scalar, &detail::saturation_mask_scalar,
                              &detail::recover_centripetal_scalar, &detail::kf_forward_scalar,
                              &detail::rts_backward_scalar};

#if defined(GYROSAT_HAVE_AVX2)
constexpr KernelTable kAvx2{Level::Avx2, &detail::saturation_mask_avx2,
                            &detail::recover_centripetal_avx2, &detail::kf_forward_avx2,
                            &detail::rts_backward_avx2};
#endif

bool cpu_has_avx2() noexcept {
#if defined(GYROSAT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

const KernelTable& select_best() {
  if (const char* forced = std::getenv("GYROSAT_SIMD"); forced != nullptr) {
    if (std::string(forced) == "scalar") return kScalar;
  }
  if (supported(Level::Avx2)) return kernels(Level::Avx2);
  return kScalar;
}

}  // namespace

bool supported(Level level) noexcept {
  switch (level) {
    case Level::Scalar:
      return true;
    case Level::Avx2:
      return cpu_has_avx2();
  }
  return false;
}

const KernelTable& kernels(Level level) {
  if (!supported(level)) {
    throw std::invalid_argument("SIMD level not supported here: " + std::string(to_string(level)));
  }
#if defined(GYROSAT_HAVE_AVX2)
  if (level == Level::Avx2) return kAvx2;
#endif
  return kScalar;
}

const KernelTable& active_kernels() {
  static const KernelTable& table = select_best();
  return table;
}

}  // namespace gyrosat::simd
