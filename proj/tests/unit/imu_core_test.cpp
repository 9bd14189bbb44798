#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "gyrosat/imu_core.hpp"

namespace gyrosat {
namespace {

ImuSample sample(double t, double gx, double gy = 0.0, double gz = 0.0) {
  ImuSample s;
  s.t = t;
  s.gyro = Vec3(gx, gy, gz);
  return s;
}

RigConfig rig(double rail, double margin) {
  RigConfig cfg = RigConfig::with_rails(Vec3::Constant(rail));
  cfg.sat_margin = margin;
  return cfg;
}

TEST(NormalizeStream, SortsByTime) {
  const auto out = normalize_stream({sample(1.0, 1.0), sample(0.0, 2.0)});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].t, 0.0);
  EXPECT_EQ(out[0].gyro.x(), 2.0);
  EXPECT_EQ(out[1].t, 1.0);
}

TEST(NormalizeStream, DuplicateTimestampKeepsLast) {
  const auto out = normalize_stream({sample(0.0, 1.0), sample(0.0, 2.0)});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].gyro.x(), 2.0);
}

TEST(NormalizeStream, DuplicatesAfterSortingKeepInputOrder) {
  const auto out =
      normalize_stream({sample(2.0, 0.0), sample(1.0, 5.0), sample(0.0, 0.0), sample(1.0, 6.0)});
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[1].gyro.x(), 6.0);
}

TEST(NormalizeStream, EmptyInputIsRejected) {
  try {
    normalize_stream({});
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("empty stream"), std::string::npos);
  }
}

TEST(NormalizeStream, NonFiniteValueNamesTheIndex) {
  std::vector<ImuSample> s{sample(0.0, 0.0), sample(1.0, 0.0), sample(2.0, 0.0)};
  s[2].accel.y() = std::numeric_limits<double>::quiet_NaN();
  try {
    normalize_stream(s);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("sample 2"), std::string::npos);
  }
  s[2].accel.y() = 0.0;
  s[1].t = std::numeric_limits<double>::infinity();
  EXPECT_THROW(normalize_stream(s), DataError);
}

TEST(NormalizeStream, OutputIsStrictlyIncreasing) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> t(0, 40);
  std::vector<ImuSample> s;
  for (int i = 0; i < 200; ++i) s.push_back(sample(t(rng) * 0.01, i));
  const auto out = normalize_stream(s);
  for (std::size_t i = 1; i < out.size(); ++i) EXPECT_LT(out[i - 1].t, out[i].t);
}

TEST(DetectSaturation, NothingBelowThreshold) {
  std::vector<ImuSample> s{sample(0.0, 1.0, -2.0, 3.0), sample(0.01, 9.0, 9.0, -9.0)};
  EXPECT_TRUE(detect_saturation(s, rig(10.5, 0.1)).empty());
}

TEST(DetectSaturation, FourSampleHandTrace) {
  std::vector<ImuSample> s{sample(0.0, 9.0), sample(0.01, 10.6), sample(0.02, 10.6),
                           sample(0.03, 9.0)};
  const auto w = detect_saturation(s, rig(10.5, 0.1));
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].axis, Axis::X);
  EXPECT_EQ(w[0].begin, 1u);
  EXPECT_EQ(w[0].end, 3u);
  EXPECT_DOUBLE_EQ(w[0].t_start, 0.01);
  EXPECT_DOUBLE_EQ(w[0].t_end, 0.02);
  EXPECT_FALSE(w[0].multi_axis);
}

TEST(DetectSaturation, ThresholdIsInclusiveAndSymmetric) {
  std::vector<ImuSample> s{sample(0.0, 10.4), sample(0.01, -10.4), sample(0.02, 10.39)};
  const auto w = detect_saturation(s, rig(10.5, 0.1));
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].begin, 0u);
  EXPECT_EQ(w[0].end, 2u);
}

TEST(DetectSaturation, SimultaneousAxesAreFlagged) {
  std::vector<ImuSample> s{sample(0.0, 0.0, 0.0), sample(0.01, 10.5, -10.5), sample(0.02, 10.5, -10.5),
                           sample(0.03, 0.0, 0.0)};
  const auto w = detect_saturation(s, rig(10.5, 0.1));
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w[0].axis, Axis::X);
  EXPECT_EQ(w[1].axis, Axis::Y);
  for (const auto& win : w) {
    EXPECT_TRUE(win.multi_axis);
    EXPECT_EQ(win.begin, 1u);
    EXPECT_EQ(win.end, 3u);
  }
}

TEST(DetectSaturation, PerAxisRails) {
  RigConfig cfg = RigConfig::with_rails(Vec3(5.0, 10.0, 20.0));
  std::vector<ImuSample> s{sample(0.0, 5.0, 5.0, 5.0), sample(0.01, 1.0, 10.0, 19.0)};
  const auto w = detect_saturation(s, cfg);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w[0].axis, Axis::X);
  EXPECT_EQ(w[0].begin, 0u);
  EXPECT_EQ(w[1].axis, Axis::Y);
  EXPECT_EQ(w[1].begin, 1u);
}

TEST(DetectSaturation, NanReadingIsNotSaturated) {
  std::vector<ImuSample> s{sample(0.0, std::numeric_limits<double>::quiet_NaN())};
  EXPECT_TRUE(detect_saturation(s, rig(10.5, 0.1)).empty());
}

// Brute-force rescan: windows tile exactly the over-threshold samples, are
// maximal, are ordered, and a second pass reproduces them.
TEST(DetectSaturation, MatchesBruteForceRescan) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> g(-12.0, 12.0);
  std::uniform_int_distribution<int> len(1, 300);
  const RigConfig cfg = rig(10.5, 0.21);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ImuSample> s;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) s.push_back(sample(i * 0.01, g(rng), g(rng), g(rng)));
    const auto windows = detect_saturation(s, cfg);

    std::vector<std::array<int, 3>> cover(s.size(), {0, 0, 0});
    for (std::size_t k = 0; k < windows.size(); ++k) {
      const auto& w = windows[k];
      const std::size_t a = index(w.axis);
      ASSERT_LT(w.begin, w.end);
      for (std::size_t i = w.begin; i < w.end; ++i) ++cover[i][a];
      if (w.begin > 0) EXPECT_LT(std::abs(s[w.begin - 1].gyro[a]), cfg.saturation_floor(w.axis));
      if (w.end < s.size()) EXPECT_LT(std::abs(s[w.end].gyro[a]), cfg.saturation_floor(w.axis));
      bool multi = false;
      for (std::size_t i = w.begin; i < w.end; ++i) {
        for (std::size_t b = 0; b < 3; ++b) {
          if (b != a && std::abs(s[i].gyro[b]) >= cfg.saturation_floor(axis_from_index(b))) multi = true;
        }
      }
      EXPECT_EQ(w.multi_axis, multi);
      if (k > 0) {
        const auto& p = windows[k - 1];
        EXPECT_TRUE(p.begin < w.begin || (p.begin == w.begin && p.axis < w.axis));
      }
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t a = 0; a < 3; ++a) {
        const bool over = std::abs(s[i].gyro[a]) >= cfg.saturation_floor(axis_from_index(a));
        EXPECT_EQ(cover[i][a], over ? 1 : 0);
      }
    }

    const auto again = detect_saturation(s, cfg);
    ASSERT_EQ(again.size(), windows.size());
    for (std::size_t k = 0; k < windows.size(); ++k) {
      EXPECT_EQ(again[k].begin, windows[k].begin);
      EXPECT_EQ(again[k].end, windows[k].end);
      EXPECT_EQ(again[k].axis, windows[k].axis);
    }
  }
}

TEST(RigConfig, DefaultMarginIsTwoPercentOfSmallestRail) {
  const RigConfig cfg = RigConfig::with_rails(Vec3(10.0, 12.0, 20.0));
  EXPECT_DOUBLE_EQ(cfg.sat_margin, 0.2);
  EXPECT_DOUBLE_EQ(cfg.saturation_floor(Axis::Y), 11.8);
}

TEST(RigConfig, ValidateRejectsBadValues) {
  RigConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.gyro_noise_var = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = RigConfig{};
  cfg.gyro_sat.y() = -1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = RigConfig{};
  cfg.sat_margin = 11.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Types, AxisAndSourceNamesRoundTrip) {
  for (std::size_t a = 0; a < 3; ++a) {
    const Axis axis = axis_from_index(a);
    EXPECT_EQ(parse_axis(std::string(1, axis_name(axis))), axis);
  }
  for (Source s : {Source::Measured, Source::Recovered, Source::Rejected, Source::Smoothed}) {
    EXPECT_EQ(parse_source(to_string(s)), s);
  }
  EXPECT_FALSE(parse_axis("w").has_value());
  EXPECT_FALSE(parse_source("guessed").has_value());
}

}  // namespace
}  // namespace gyrosat
