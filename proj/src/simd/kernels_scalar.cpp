#include <cmath>
#include <limits>

#include "kernels_internal.hpp"

namespace gyrosat::simd::detail {

void saturation_mask_scalar(std::size_t n, const double* gx, const double* gy, const double* gz,
                            const double* floor3, std::uint8_t* mask) {
  for (std::size_t i = 0; i < n; ++i) {
    std::uint8_t m = 0;
    if (std::fabs(gx[i]) >= floor3[0]) m |= 1u;
    if (std::fabs(gy[i]) >= floor3[1]) m |= 2u;
    if (std::fabs(gz[i]) >= floor3[2]) m |= 4u;
    mask[i] = m;
  }
}

void recover_centripetal_scalar_range(const CentripetalBatch& b, std::size_t begin,
                                      std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) {
    // Centripetal component of the proper acceleration: omega^2 * |r|.
    const double centripetal = b.ax[i] * b.xx[i] + b.ay[i] * b.xy[i] + b.az[i] * b.xz[i];
    const double radicand = centripetal / b.lever[i] - b.u1[i] * b.u1[i] - b.u2[i] * b.u2[i];
    if (radicand < 0.0) {
      b.value[i] = std::numeric_limits<double>::quiet_NaN();
      b.status[i] = static_cast<std::uint8_t>(CentripetalStatus::NegativeRadicand);
      continue;
    }
    double magnitude = std::sqrt(radicand);
    auto status = CentripetalStatus::Recovered;
    if (magnitude < b.floor[i]) {
      magnitude = b.floor[i];
      status = CentripetalStatus::Clamped;
    }
    b.value[i] = b.sign[i] * magnitude;
    b.status[i] = static_cast<std::uint8_t>(status);
  }
}

void recover_centripetal_scalar(const CentripetalBatch& b) {
  recover_centripetal_scalar_range(b, 0, b.n);
}

void kf_forward_scalar(std::size_t n, const double* dt, const MeasurementLanes* meas, double q,
                       GaussLanes* pred, GaussLanes* filt) {
  if (n == 0) return;
  pred[0] = filt[0];
  for (std::size_t k = 1; k < n; ++k) {
    const double h = dt[k];
    const double h2 = h * h;
    const double h3 = h2 * h;
    const double q00 = q * h3 / 3.0;
    const double q01 = q * h2 * 0.5;
    const double q11 = q * h;
    const double two_h = 2.0 * h;
    const GaussLanes& prev = filt[k - 1];
    GaussLanes& p = pred[k];
    GaussLanes& f = filt[k];
    const MeasurementLanes& z = meas[k];
    for (std::size_t l = 0; l < 4; ++l) {
      const double m0 = prev.m0[l] + h * prev.m1[l];
      const double m1 = prev.m1[l];
      const double a00 = prev.p00[l] + two_h * prev.p01[l] + h2 * prev.p11[l] + q00;
      const double a01 = prev.p01[l] + h * prev.p11[l] + q01;
      const double a11 = prev.p11[l] + q11;
      p.m0[l] = m0;
      p.m1[l] = m1;
      p.p00[l] = a00;
      p.p01[l] = a01;
      p.p11[l] = a11;

      if (z.present[l] > 0.5) {
        // Joseph form with H = [1 0].
        const double r = z.r[l];
        const double s = a00 + r;
        const double k0 = a00 / s;
        const double k1 = a01 / s;
        const double innov = z.y[l] - m0;
        const double one_minus_k0 = 1.0 - k0;
        f.m0[l] = m0 + k0 * innov;
        f.m1[l] = m1 + k1 * innov;
        f.p00[l] = one_minus_k0 * one_minus_k0 * a00 + r * k0 * k0;
        f.p01[l] = one_minus_k0 * (a01 - k1 * a00) + r * k0 * k1;
        f.p11[l] = k1 * k1 * a00 - 2.0 * k1 * a01 + a11 + r * k1 * k1;
      } else {
        f.m0[l] = m0;
        f.m1[l] = m1;
        f.p00[l] = a00;
        f.p01[l] = a01;
        f.p11[l] = a11;
      }
    }
  }
}

void rts_backward_scalar(std::size_t n, const double* dt, double q, const GaussLanes* pred,
                         const GaussLanes* filt, GaussLanes* smooth, CrossLanes* cross) {
  if (n == 0) return;
  smooth[n - 1] = filt[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) {
    const double h = dt[k + 1];
    const double h2 = h * h;
    const double two_h = 2.0 * h;
    const double q00 = q * (h2 * h) / 3.0;
    const double q01 = q * h2 * 0.5;
    const double q11 = q * h;
    const double det_q = (q * q) * (h2 * h2) / 12.0;
    const GaussLanes& f = filt[k];
    const GaussLanes& pp = pred[k + 1];
    const GaussLanes& s = smooth[k + 1];
    GaussLanes& out = smooth[k];
    CrossLanes& c = cross[k];
    for (std::size_t l = 0; l < 4; ++l) {
      // Phi F Phi^T, and det(Phi F Phi^T + Q) expanded so that no large terms cancel.
      const double m00 = f.p00[l] + two_h * f.p01[l] + h2 * f.p11[l];
      const double m01 = f.p01[l] + h * f.p11[l];
      const double m11 = f.p11[l];
      const double det = ((f.p00[l] * f.p11[l] - f.p01[l] * f.p01[l]) + det_q) +
                         ((m00 * q11 + m11 * q00) - 2.0 * (m01 * q01));

      // W = Q P^-1;  G = Phi^-1 (I - W);  I - G Phi = Phi^-1 W Phi.
      const double w00 = (q00 * pp.p11[l] - q01 * pp.p01[l]) / det;
      const double w01 = (q01 * pp.p00[l] - q00 * pp.p01[l]) / det;
      const double w10 = (q01 * pp.p11[l] - q11 * pp.p01[l]) / det;
      const double w11 = (q11 * pp.p00[l] - q01 * pp.p01[l]) / det;
      const double i00 = 1.0 - w00;
      const double i01 = 0.0 - w01;
      const double i10 = 0.0 - w10;
      const double i11 = 1.0 - w11;
      const double g00 = i00 - h * i10;
      const double g01 = i01 - h * i11;
      const double g10 = i10;
      const double g11 = i11;
      const double x00 = w00 - h * w10;
      const double x01 = w01 - h * w11;
      const double e00 = x00;
      const double e01 = x00 * h + x01;
      const double e10 = w10;
      const double e11 = w10 * h + w11;

      const double dm0 = s.m0[l] - pp.m0[l];
      const double dm1 = s.m1[l] - pp.m1[l];
      out.m0[l] = f.m0[l] + g00 * dm0 + g01 * dm1;
      out.m1[l] = f.m1[l] + g10 * dm0 + g11 * dm1;

      // (I - G Phi) F (I - G Phi)^T + G (Q + S) G^T
      const double u00 = e00 * f.p00[l] + e01 * f.p01[l];
      const double u01 = e00 * f.p01[l] + e01 * f.p11[l];
      const double u10 = e10 * f.p00[l] + e11 * f.p01[l];
      const double u11 = e10 * f.p01[l] + e11 * f.p11[l];
      const double y00 = q00 + s.p00[l];
      const double y01 = q01 + s.p01[l];
      const double y11 = q11 + s.p11[l];
      const double v00 = g00 * y00 + g01 * y01;
      const double v01 = g00 * y01 + g01 * y11;
      const double v10 = g10 * y00 + g11 * y01;
      const double v11 = g10 * y01 + g11 * y11;
      out.p00[l] = (u00 * e00 + u01 * e01) + (v00 * g00 + v01 * g01);
      out.p01[l] = (u00 * e10 + u01 * e11) + (v00 * g10 + v01 * g11);
      out.p11[l] = (u10 * e10 + u11 * e11) + (v10 * g10 + v11 * g11);

      c.c00[l] = g00 * s.p00[l] + g01 * s.p01[l];
      c.c01[l] = g00 * s.p01[l] + g01 * s.p11[l];
      c.c10[l] = g10 * s.p00[l] + g11 * s.p01[l];
      c.c11[l] = g10 * s.p01[l] + g11 * s.p11[l];
    }
  }
}

}  // namespace gyrosat::simd::detail
