// Compiled with -mavx2. Mirrors kernels_scalar.cpp operation for operation.

#include <immintrin.h>

#include <cmath>
#include <cstring>

#include "kernels_internal.hpp"

namespace gyrosat::simd::detail {
namespace {

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

// Raw addressing keeps std::array members out of this TU so no inline
// instantiation compiled with -mavx2 can leak into scalar code at link time.
inline __m256d load(const std::array<double, 4>& a) {
  return _mm256_load_pd(reinterpret_cast<const double*>(&a));
}
inline void store(std::array<double, 4>& a, __m256d v) {
  _mm256_store_pd(reinterpret_cast<double*>(&a), v);
}

}  // namespace

void saturation_mask_avx2(std::size_t n, const double* gx, const double* gy, const double* gz,
                          const double* floor3, std::uint8_t* mask) {
  const __m256d fx = _mm256_set1_pd(floor3[0]);
  const __m256d fy = _mm256_set1_pd(floor3[1]);
  const __m256d fz = _mm256_set1_pd(floor3[2]);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const int mx = _mm256_movemask_pd(_mm256_cmp_pd(abs_pd(_mm256_loadu_pd(gx + i)), fx, _CMP_GE_OQ));
    const int my = _mm256_movemask_pd(_mm256_cmp_pd(abs_pd(_mm256_loadu_pd(gy + i)), fy, _CMP_GE_OQ));
    const int mz = _mm256_movemask_pd(_mm256_cmp_pd(abs_pd(_mm256_loadu_pd(gz + i)), fz, _CMP_GE_OQ));
    for (int l = 0; l < 4; ++l) {
      mask[i + l] = static_cast<std::uint8_t>(((mx >> l) & 1) | (((my >> l) & 1) << 1) |
                                              (((mz >> l) & 1) << 2));
    }
  }
  saturation_mask_scalar(n - i, gx + i, gy + i, gz + i, floor3, mask + i);
}

void recover_centripetal_avx2(const CentripetalBatch& b) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d nan = _mm256_set1_pd(std::nan(""));
  std::size_t i = 0;
  for (; i + 4 <= b.n; i += 4) {
    const __m256d centripetal = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(_mm256_loadu_pd(b.ax + i), _mm256_loadu_pd(b.xx + i)),
                      _mm256_mul_pd(_mm256_loadu_pd(b.ay + i), _mm256_loadu_pd(b.xy + i))),
        _mm256_mul_pd(_mm256_loadu_pd(b.az + i), _mm256_loadu_pd(b.xz + i)));
    const __m256d u1 = _mm256_loadu_pd(b.u1 + i);
    const __m256d u2 = _mm256_loadu_pd(b.u2 + i);
    const __m256d radicand = _mm256_sub_pd(
        _mm256_sub_pd(_mm256_div_pd(centripetal, _mm256_loadu_pd(b.lever + i)),
                      _mm256_mul_pd(u1, u1)),
        _mm256_mul_pd(u2, u2));
    const __m256d negative = _mm256_cmp_pd(radicand, zero, _CMP_LT_OQ);
    // sqrt of a negative lane is discarded by the blend below.
    const __m256d magnitude = _mm256_sqrt_pd(radicand);
    const __m256d floor = _mm256_loadu_pd(b.floor + i);
    const __m256d below = _mm256_cmp_pd(magnitude, floor, _CMP_LT_OQ);
    const __m256d clamped = _mm256_blendv_pd(magnitude, floor, below);
    const __m256d value = _mm256_mul_pd(_mm256_loadu_pd(b.sign + i), clamped);
    _mm256_storeu_pd(b.value + i, _mm256_blendv_pd(value, nan, negative));

    const int neg_bits = _mm256_movemask_pd(negative);
    const int below_bits = _mm256_movemask_pd(below);
    for (int l = 0; l < 4; ++l) {
      CentripetalStatus s = CentripetalStatus::Recovered;
      if ((neg_bits >> l) & 1) {
        s = CentripetalStatus::NegativeRadicand;
      } else if ((below_bits >> l) & 1) {
        s = CentripetalStatus::Clamped;
      }
      b.status[i + l] = static_cast<std::uint8_t>(s);
    }
  }
  recover_centripetal_scalar_range(b, i, b.n);
}

void kf_forward_avx2(std::size_t n, const double* dt, const MeasurementLanes* meas, double q,
                     GaussLanes* pred, GaussLanes* filt) {
  if (n == 0) return;
  std::memcpy(&pred[0], &filt[0], sizeof(GaussLanes));
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d half = _mm256_set1_pd(0.5);
  for (std::size_t k = 1; k < n; ++k) {
    const double hs = dt[k];
    const double h2s = hs * hs;
    const double h3s = h2s * hs;
    const __m256d h = _mm256_set1_pd(hs);
    const __m256d h2 = _mm256_set1_pd(h2s);
    const __m256d q00 = _mm256_set1_pd(q * h3s / 3.0);
    const __m256d q01 = _mm256_set1_pd(q * h2s * 0.5);
    const __m256d q11 = _mm256_set1_pd(q * hs);
    const __m256d two_h = _mm256_set1_pd(2.0 * hs);

    const GaussLanes& prev = filt[k - 1];
    const __m256d pm0 = load(prev.m0);
    const __m256d pm1 = load(prev.m1);
    const __m256d pp00 = load(prev.p00);
    const __m256d pp01 = load(prev.p01);
    const __m256d pp11 = load(prev.p11);

    const __m256d m0 = _mm256_add_pd(pm0, _mm256_mul_pd(h, pm1));
    const __m256d m1 = pm1;
    const __m256d a00 = _mm256_add_pd(
        _mm256_add_pd(_mm256_add_pd(pp00, _mm256_mul_pd(two_h, pp01)), _mm256_mul_pd(h2, pp11)),
        q00);
    const __m256d a01 = _mm256_add_pd(_mm256_add_pd(pp01, _mm256_mul_pd(h, pp11)), q01);
    const __m256d a11 = _mm256_add_pd(pp11, q11);

    GaussLanes& p = pred[k];
    store(p.m0, m0);
    store(p.m1, m1);
    store(p.p00, a00);
    store(p.p01, a01);
    store(p.p11, a11);

    const MeasurementLanes& z = meas[k];
    const __m256d r = load(z.r);
    const __m256d present = _mm256_cmp_pd(load(z.present), half, _CMP_GT_OQ);
    const __m256d s = _mm256_add_pd(a00, r);
    const __m256d k0 = _mm256_div_pd(a00, s);
    const __m256d k1 = _mm256_div_pd(a01, s);
    const __m256d innov = _mm256_sub_pd(load(z.y), m0);
    const __m256d omk0 = _mm256_sub_pd(one, k0);

    const __m256d u_m0 = _mm256_add_pd(m0, _mm256_mul_pd(k0, innov));
    const __m256d u_m1 = _mm256_add_pd(m1, _mm256_mul_pd(k1, innov));
    const __m256d u00 = _mm256_add_pd(_mm256_mul_pd(_mm256_mul_pd(omk0, omk0), a00),
                                      _mm256_mul_pd(_mm256_mul_pd(r, k0), k0));
    const __m256d u01 = _mm256_add_pd(
        _mm256_mul_pd(omk0, _mm256_sub_pd(a01, _mm256_mul_pd(k1, a00))),
        _mm256_mul_pd(_mm256_mul_pd(r, k0), k1));
    const __m256d u11 = _mm256_add_pd(
        _mm256_add_pd(_mm256_sub_pd(_mm256_mul_pd(_mm256_mul_pd(k1, k1), a00),
                                    _mm256_mul_pd(_mm256_mul_pd(two, k1), a01)),
                      a11),
        _mm256_mul_pd(_mm256_mul_pd(r, k1), k1));

    GaussLanes& f = filt[k];
    store(f.m0, _mm256_blendv_pd(m0, u_m0, present));
    store(f.m1, _mm256_blendv_pd(m1, u_m1, present));
    store(f.p00, _mm256_blendv_pd(a00, u00, present));
    store(f.p01, _mm256_blendv_pd(a01, u01, present));
    store(f.p11, _mm256_blendv_pd(a11, u11, present));
  }
}

void rts_backward_avx2(std::size_t n, const double* dt, double q, const GaussLanes* pred,
                       const GaussLanes* filt, GaussLanes* smooth, CrossLanes* cross) {
  if (n == 0) return;
  std::memcpy(&smooth[n - 1], &filt[n - 1], sizeof(GaussLanes));
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d zero = _mm256_setzero_pd();
  for (std::size_t k = n - 1; k-- > 0;) {
    const double hs = dt[k + 1];
    const double h2s = hs * hs;
    const __m256d h = _mm256_set1_pd(hs);
    const __m256d h2 = _mm256_set1_pd(h2s);
    const __m256d two_h = _mm256_set1_pd(2.0 * hs);
    const __m256d q00 = _mm256_set1_pd(q * (h2s * hs) / 3.0);
    const __m256d q01 = _mm256_set1_pd(q * h2s * 0.5);
    const __m256d q11 = _mm256_set1_pd(q * hs);
    const __m256d det_q = _mm256_set1_pd((q * q) * (h2s * h2s) / 12.0);
    const GaussLanes& f = filt[k];
    const GaussLanes& pp = pred[k + 1];
    const GaussLanes& s = smooth[k + 1];
    GaussLanes& out = smooth[k];

    const __m256d f00 = load(f.p00);
    const __m256d f01 = load(f.p01);
    const __m256d f11 = load(f.p11);
    const __m256d m00 = _mm256_add_pd(_mm256_add_pd(f00, _mm256_mul_pd(two_h, f01)),
                                      _mm256_mul_pd(h2, f11));
    const __m256d m01 = _mm256_add_pd(f01, _mm256_mul_pd(h, f11));
    const __m256d m11 = f11;
    const __m256d det = _mm256_add_pd(
        _mm256_add_pd(_mm256_sub_pd(_mm256_mul_pd(f00, f11), _mm256_mul_pd(f01, f01)), det_q),
        _mm256_sub_pd(_mm256_add_pd(_mm256_mul_pd(m00, q11), _mm256_mul_pd(m11, q00)),
                      _mm256_mul_pd(two, _mm256_mul_pd(m01, q01))));

    const __m256d b00 = load(pp.p00);
    const __m256d b01 = load(pp.p01);
    const __m256d b11 = load(pp.p11);
    const __m256d w00 = _mm256_div_pd(_mm256_sub_pd(_mm256_mul_pd(q00, b11), _mm256_mul_pd(q01, b01)), det);
    const __m256d w01 = _mm256_div_pd(_mm256_sub_pd(_mm256_mul_pd(q01, b00), _mm256_mul_pd(q00, b01)), det);
    const __m256d w10 = _mm256_div_pd(_mm256_sub_pd(_mm256_mul_pd(q01, b11), _mm256_mul_pd(q11, b01)), det);
    const __m256d w11 = _mm256_div_pd(_mm256_sub_pd(_mm256_mul_pd(q11, b00), _mm256_mul_pd(q01, b01)), det);
    const __m256d i00 = _mm256_sub_pd(one, w00);
    const __m256d i01 = _mm256_sub_pd(zero, w01);
    const __m256d i10 = _mm256_sub_pd(zero, w10);
    const __m256d i11 = _mm256_sub_pd(one, w11);
    const __m256d g00 = _mm256_sub_pd(i00, _mm256_mul_pd(h, i10));
    const __m256d g01 = _mm256_sub_pd(i01, _mm256_mul_pd(h, i11));
    const __m256d g10 = i10;
    const __m256d g11 = i11;
    const __m256d x00 = _mm256_sub_pd(w00, _mm256_mul_pd(h, w10));
    const __m256d x01 = _mm256_sub_pd(w01, _mm256_mul_pd(h, w11));
    const __m256d e00 = x00;
    const __m256d e01 = _mm256_add_pd(_mm256_mul_pd(x00, h), x01);
    const __m256d e10 = w10;
    const __m256d e11 = _mm256_add_pd(_mm256_mul_pd(w10, h), w11);

    const __m256d dm0 = _mm256_sub_pd(load(s.m0), load(pp.m0));
    const __m256d dm1 = _mm256_sub_pd(load(s.m1), load(pp.m1));
    store(out.m0, _mm256_add_pd(_mm256_add_pd(load(f.m0), _mm256_mul_pd(g00, dm0)),
                                _mm256_mul_pd(g01, dm1)));
    store(out.m1, _mm256_add_pd(_mm256_add_pd(load(f.m1), _mm256_mul_pd(g10, dm0)),
                                _mm256_mul_pd(g11, dm1)));

    const __m256d s00 = load(s.p00);
    const __m256d s01 = load(s.p01);
    const __m256d s11 = load(s.p11);
    const __m256d u00 = _mm256_add_pd(_mm256_mul_pd(e00, f00), _mm256_mul_pd(e01, f01));
    const __m256d u01 = _mm256_add_pd(_mm256_mul_pd(e00, f01), _mm256_mul_pd(e01, f11));
    const __m256d u10 = _mm256_add_pd(_mm256_mul_pd(e10, f00), _mm256_mul_pd(e11, f01));
    const __m256d u11 = _mm256_add_pd(_mm256_mul_pd(e10, f01), _mm256_mul_pd(e11, f11));
    const __m256d y00 = _mm256_add_pd(q00, s00);
    const __m256d y01 = _mm256_add_pd(q01, s01);
    const __m256d y11 = _mm256_add_pd(q11, s11);
    const __m256d v00 = _mm256_add_pd(_mm256_mul_pd(g00, y00), _mm256_mul_pd(g01, y01));
    const __m256d v01 = _mm256_add_pd(_mm256_mul_pd(g00, y01), _mm256_mul_pd(g01, y11));
    const __m256d v10 = _mm256_add_pd(_mm256_mul_pd(g10, y00), _mm256_mul_pd(g11, y01));
    const __m256d v11 = _mm256_add_pd(_mm256_mul_pd(g10, y01), _mm256_mul_pd(g11, y11));
    store(out.p00, _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(u00, e00), _mm256_mul_pd(u01, e01)),
                                 _mm256_add_pd(_mm256_mul_pd(v00, g00), _mm256_mul_pd(v01, g01))));
    store(out.p01, _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(u00, e10), _mm256_mul_pd(u01, e11)),
                                 _mm256_add_pd(_mm256_mul_pd(v00, g10), _mm256_mul_pd(v01, g11))));
    store(out.p11, _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(u10, e10), _mm256_mul_pd(u11, e11)),
                                 _mm256_add_pd(_mm256_mul_pd(v10, g10), _mm256_mul_pd(v11, g11))));

    CrossLanes& c = cross[k];
    store(c.c00, _mm256_add_pd(_mm256_mul_pd(g00, s00), _mm256_mul_pd(g01, s01)));
    store(c.c01, _mm256_add_pd(_mm256_mul_pd(g00, s01), _mm256_mul_pd(g01, s11)));
    store(c.c10, _mm256_add_pd(_mm256_mul_pd(g10, s00), _mm256_mul_pd(g11, s01)));
    store(c.c11, _mm256_add_pd(_mm256_mul_pd(g10, s01), _mm256_mul_pd(g11, s11)));
  }
}

}  // namespace gyrosat::simd::detail
