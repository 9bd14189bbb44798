#pragma once

#include "gyrosat/simd/kernels.hpp"

namespace gyrosat::simd::detail {

// Scalar reference kernels. The AVX2 variants fall back to these for tails.
void saturation_mask_scalar(std::size_t n, const double* gx, const double* gy, const double* gz,
                            const double* floor3, std::uint8_t* mask);
void recover_centripetal_scalar(const CentripetalBatch& batch);
void recover_centripetal_scalar_range(const CentripetalBatch& batch, std::size_t begin,
                                      std::size_t end);
void kf_forward_scalar(std::size_t n, const double* dt, const MeasurementLanes* meas, double q,
                       GaussLanes* pred, GaussLanes* filt);
void rts_backward_scalar(std::size_t n, const double* dt, double q, const GaussLanes* pred,
                         const GaussLanes* filt, GaussLanes* smooth, CrossLanes* cross);

#if defined(GYROSAT_HAVE_AVX2)
void saturation_mask_avx2(std::size_t n, const double* gx, const double* gy, const double* gz,
                          const double* floor3, std::uint8_t* mask);
void recover_centripetal_avx2(const CentripetalBatch& batch);
void kf_forward_avx2(std::size_t n, const double* dt, const MeasurementLanes* meas, double q,
                     GaussLanes* pred, GaussLanes* filt);
void rts_backward_avx2(std::size_t n, const double* dt, double q, const GaussLanes* pred,
                       const GaussLanes* filt, GaussLanes* smooth, CrossLanes* cross);
#endif

}  // namespace gyrosat::simd::detail
