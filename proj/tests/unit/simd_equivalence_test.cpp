#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <vector>

#include "gyrosat/freefall.hpp"
#include "gyrosat/simd/kernels.hpp"
#include "gyrosat/sim.hpp"
#include "gyrosat/smoother.hpp"

namespace gyrosat {
namespace {

using simd::Level;

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

template <std::size_t N>
bool same_bits(const std::array<double, N>& a, const std::array<double, N>& b) {
  return std::memcmp(a.data(), b.data(), sizeof(double) * N) == 0;
}

class SimdEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!simd::supported(Level::Avx2)) GTEST_SKIP() << "AVX2 not available on this CPU";
  }
  const simd::KernelTable& scalar = simd::kernels(Level::Scalar);
  const simd::KernelTable& avx2() const { return simd::kernels(Level::Avx2); }
};

TEST(SimdDispatch, ScalarAlwaysSupported) {
  EXPECT_TRUE(simd::supported(Level::Scalar));
  EXPECT_EQ(simd::kernels(Level::Scalar).level, Level::Scalar);
  EXPECT_EQ(simd::to_string(Level::Scalar), "scalar");
  if (!simd::supported(Level::Avx2)) EXPECT_THROW(simd::kernels(Level::Avx2), std::invalid_argument);
}

TEST_F(SimdEquivalence, SaturationMaskAllLengthsAndSpecials) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-12.0, 12.0);
  const double floor3[3] = {10.29, 10.29, 9.0};
  const double specials[] = {std::numeric_limits<double>::quiet_NaN(),
                             std::numeric_limits<double>::infinity(), -0.0, 10.29, -10.29, 9.0};
  for (std::size_t n = 0; n <= 67; ++n) {
    std::vector<double> gx(n), gy(n), gz(n);
    for (std::size_t i = 0; i < n; ++i) {
      gx[i] = u(rng);
      gy[i] = u(rng);
      gz[i] = rng() % 5 == 0 ? specials[rng() % 6] : u(rng);
    }
    std::vector<std::uint8_t> a(n, 0xff), b(n, 0xee);
    scalar.saturation_mask(n, gx.data(), gy.data(), gz.data(), floor3, a.data());
    avx2().saturation_mask(n, gx.data(), gy.data(), gz.data(), floor3, b.data());
    EXPECT_EQ(a, b) << "n = " << n;
  }
}

TEST_F(SimdEquivalence, RecoverCentripetalBitExact) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nrm(0.0, 1.0);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 13u, 1000u, 1003u}) {
    std::vector<double> ax(n), ay(n), az(n), xx(n), xy(n), xz(n), lever(n), u1(n), u2(n), fl(n), sg(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 x = Vec3(nrm(rng), nrm(rng), nrm(rng)).normalized();
      xx[i] = x.x();
      xy[i] = x.y();
      xz[i] = x.z();
      lever[i] = 0.02 + 0.2 * std::abs(nrm(rng));
      const double w = 4.0 * nrm(rng) + 12.0;
      const Vec3 a = (w * w * lever[i]) * x + 3.0 * Vec3(nrm(rng), nrm(rng), nrm(rng));
      ax[i] = a.x();
      ay[i] = a.y();
      az[i] = a.z();
      u1[i] = 3.0 * nrm(rng);
      u2[i] = 3.0 * nrm(rng);
      fl[i] = 10.29;
      sg[i] = rng() % 2 ? 1.0 : -1.0;
      switch (rng() % 12) {
        case 0: ax[i] = std::numeric_limits<double>::quiet_NaN(); break;
        case 1: u1[i] = std::numeric_limits<double>::infinity(); break;
        case 2: ax[i] = ay[i] = az[i] = 0.0; u1[i] = u2[i] = 0.0; break;  // radicand exactly 0
        default: break;
      }
    }
    std::vector<double> va(n, 1.0), vb(n, 2.0);
    std::vector<std::uint8_t> sa(n, 9), sb(n, 7);
    simd::CentripetalBatch b{n, ax.data(), ay.data(), az.data(), xx.data(), xy.data(), xz.data(),
                             lever.data(), u1.data(), u2.data(), fl.data(), sg.data(), va.data(),
                             sa.data()};
    scalar.recover_centripetal(b);
    b.value = vb.data();
    b.status = sb.data();
    avx2().recover_centripetal(b);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_TRUE(same_bits(va[i], vb[i])) << "n=" << n << " i=" << i << " " << va[i] << " " << vb[i];
      ASSERT_EQ(sa[i], sb[i]) << "n=" << n << " i=" << i;
    }
  }
}

struct LaneProblem {
  std::vector<double> dt;
  std::vector<simd::MeasurementLanes> meas;
  simd::GaussLanes prior;
};

LaneProblem random_lanes(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LaneProblem p;
  p.dt.resize(n);
  p.meas.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    p.dt[k] = 0.002 + 0.03 * u(rng);
    for (std::size_t l = 0; l < 4; ++l) {
      p.meas[k].y[l] = 20.0 * u(rng) - 10.0;
      p.meas[k].r[l] = u(rng) < 0.5 ? 2.74e-5 : 3.65;
      p.meas[k].present[l] = u(rng) < 0.8 ? 1.0 : 0.0;
    }
  }
  for (std::size_t l = 0; l < 4; ++l) {
    p.prior.m0[l] = p.meas[0].y[l];
    p.prior.p00[l] = 2.74e-5;
    p.prior.p11[l] = 1e4;
  }
  return p;
}

TEST_F(SimdEquivalence, KalmanAndRtsBitExact) {
  std::mt19937_64 rng(3);
  for (std::size_t n : {1u, 2u, 3u, 10u, 257u}) {
    for (double q : {1.0, 1e6}) {
      const LaneProblem p = random_lanes(rng, n);
      std::vector<simd::GaussLanes> pa(n), fa(n), sa(n), pb(n), fb(n), sb(n);
      std::vector<simd::CrossLanes> ca(n), cb(n);
      fa[0] = fb[0] = p.prior;
      scalar.kf_forward(n, p.dt.data(), p.meas.data(), q, pa.data(), fa.data());
      avx2().kf_forward(n, p.dt.data(), p.meas.data(), q, pb.data(), fb.data());
      scalar.rts_backward(n, p.dt.data(), q, pa.data(), fa.data(), sa.data(), ca.data());
      avx2().rts_backward(n, p.dt.data(), q, pb.data(), fb.data(), sb.data(), cb.data());
      for (std::size_t k = 0; k < n; ++k) {
        for (auto m : {&simd::GaussLanes::m0, &simd::GaussLanes::m1, &simd::GaussLanes::p00,
                       &simd::GaussLanes::p01, &simd::GaussLanes::p11}) {
          ASSERT_TRUE(same_bits(pa[k].*m, pb[k].*m)) << "pred n=" << n << " k=" << k;
          ASSERT_TRUE(same_bits(fa[k].*m, fb[k].*m)) << "filt n=" << n << " k=" << k;
          ASSERT_TRUE(same_bits(sa[k].*m, sb[k].*m)) << "smooth n=" << n << " k=" << k;
        }
        if (k + 1 < n) {
          for (auto c : {&simd::CrossLanes::c00, &simd::CrossLanes::c01, &simd::CrossLanes::c10,
                         &simd::CrossLanes::c11}) {
            ASSERT_TRUE(same_bits(ca[k].*c, cb[k].*c)) << "cross n=" << n << " k=" << k;
          }
        }
      }
    }
  }
}

TEST_F(SimdEquivalence, FullPipelineBitExact) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ScenarioResult sim = run_scenario(make_tumble(seed));
    RigConfig cfg;
    cfg.bootstrap_axis = true;
    const auto wa = detect_saturation(sim.measurements, cfg, scalar);
    const auto wb = detect_saturation(sim.measurements, cfg, avx2());
    ASSERT_EQ(wa.size(), wb.size());
    const RecoveredStream ra = recover_stream(sim.measurements, wa, cfg, scalar);
    const RecoveredStream rb = recover_stream(sim.measurements, wb, cfg, avx2());
    ASSERT_EQ(ra.estimates.size(), rb.estimates.size());
    for (std::size_t i = 0; i < ra.estimates.size(); ++i) {
      for (int a = 0; a < 3; ++a) {
        ASSERT_TRUE(same_bits(ra.estimates[i].omega[a], rb.estimates[i].omega[a]));
      }
      ASSERT_EQ(ra.estimates[i].source, rb.estimates[i].source);
    }
    const auto ka = smooth(ra.estimates, cfg, scalar).knot_estimates();
    const auto kb = smooth(rb.estimates, cfg, avx2()).knot_estimates();
    for (std::size_t i = 0; i < ka.size(); ++i) {
      for (int a = 0; a < 3; ++a) {
        ASSERT_TRUE(same_bits(ka[i].omega[a], kb[i].omega[a]));
        ASSERT_TRUE(same_bits(ka[i].var[a], kb[i].var[a]));
      }
    }
  }
}

}  // namespace
}  // namespace gyrosat
