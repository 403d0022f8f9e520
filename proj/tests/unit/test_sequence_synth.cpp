#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "muvsim/errors.hpp"
#include "muvsim/sequence_synth.hpp"
#include "oracles.hpp"

using namespace muvsim;

namespace {

MuscleScene one_unit_scene(Point2 c, double d, std::vector<double> times) {
  MuscleScene s;
  MotorUnitSpec u;
  u.center = c;
  u.diameter_mm = d;
  u.twitch = {1.0, 0.075};
  u.firing.times_s = std::move(times);
  u.firing.nominal_rate_hz = 10.0;
  s.units.push_back(u);
  return s;
}

MuscleScene merge(const MuscleScene& a, const MuscleScene& b) {
  MuscleScene m = a;
  for (auto u : b.units) {
    u.id += static_cast<int>(a.units.size());
    m.units.push_back(u);
  }
  return m;
}

}  // namespace

TEST(Rasterize, SmallestDiameterOnPixelCentre) {
  const GridSpec g;
  const Point2 c{g.column_center_mm(20), g.row_center_mm(30)};
  const TerritoryMask m = rasterize_territory(c, 2.5, g);
  EXPECT_EQ(static_cast<long>(m.count()), oracle::lattice_disc_count(2.0));
  EXPECT_EQ(m.count(), 13u);
  EXPECT_TRUE(m.get(30, 20));
  EXPECT_TRUE(m.get(28, 20));
  EXPECT_FALSE(m.get(28, 21));
}

TEST(Rasterize, LargestDiameterNearCircleArea) {
  const GridSpec g;
  const Point2 c{g.column_center_mm(32), g.row_center_mm(32)};
  const TerritoryMask m = rasterize_territory(c, 10.0, g);
  EXPECT_EQ(static_cast<long>(m.count()), oracle::lattice_disc_count(8.0));
  EXPECT_EQ(m.count(), 197u);
  EXPECT_NEAR(static_cast<double>(m.count()), std::numbers::pi * 64.0, 0.05 * std::numbers::pi * 64.0);
}

TEST(Rasterize, OutsideFovRejected) {
  const GridSpec g;
  EXPECT_THROW(rasterize_territory({1.0, 20.0}, 5.0, g), ParameterError);
}

TEST(UnitSignal, SumsTwitchesAtFrameTimes) {
  const GridSpec g;
  MotorUnitSpec u;
  u.twitch = {0.8, 0.06};
  u.firing.times_s = {0.1, 0.23, 0.5};
  const auto s = unit_signal(u, g);
  ASSERT_EQ(s.size(), 400u);
  for (int k : {0, 40, 41, 95, 200, 399}) {
    double expected = 0.0;
    for (const double t : u.firing.times_s) expected += twitch_velocity(k / 400.0 - t, u.twitch);
    EXPECT_NEAR(s[k], expected, 1e-12 * (1.0 + std::abs(expected)));
  }
  EXPECT_EQ(s[39], 0.0);
}

TEST(Render, VoxelIsSumOfCoveringUnits) {
  const GridSpec g;
  MuscleScene a = one_unit_scene({10.0, 10.0}, 8.0, {0.05, 0.4});
  MuscleScene b = one_unit_scene({13.0, 10.0}, 8.0, {0.2});
  const MuscleScene s = merge(a, b);
  const RenderedScene r = render_scene(s, g);
  ASSERT_EQ(r.truths.size(), 2u);
  const auto sa = unit_signal(s.units[0], g);
  const auto sb = unit_signal(s.units[1], g);
  for (int row = 0; row < g.height_px; ++row) {
    for (int col = 0; col < g.width_px; ++col) {
      const bool in_a = r.truths[0].mask.get(row, col);
      const bool in_b = r.truths[1].mask.get(row, col);
      for (int k : {20, 100, 170}) {
        const double e = (in_a ? sa[k] : 0.0) + (in_b ? sb[k] : 0.0);
        ASSERT_NEAR(r.sequence.at(k, row, col), e, 1e-12 * (1.0 + std::abs(e)));
      }
    }
  }
  EXPECT_EQ(r.truths[0].signal.size(), 400u);
  EXPECT_EQ(r.truths[0].firing, s.units[0].firing);
}

TEST(Render, Superposition) {
  const GridSpec g;
  Rng root(55);
  for (int trial = 0; trial < 10; ++trial) {
    Rng ra = root.fork(2 * trial), rb = root.fork(2 * trial + 1);
    const MuscleScene a = build_scene(ra, 1 + trial);
    const MuscleScene b = build_scene(rb, 3);
    const auto va = render_scene(a, g).sequence;
    const auto vb = render_scene(b, g).sequence;
    const auto vab = render_scene(merge(a, b), g).sequence;
    double peak = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < vab.size(); ++i) {
      peak = std::max(peak, std::abs(vab.data()[i]));
      worst = std::max(worst, std::abs(va.data()[i] + vb.data()[i] - vab.data()[i]));
    }
    EXPECT_LE(worst, 1e-12 * peak);
  }
}

TEST(Noise, InfiniteSnrIsExactCopy) {
  const GridSpec g;
  Rng r(1);
  const auto v = render_scene(build_scene(r, 4), g).sequence;
  Rng n(2);
  EXPECT_EQ(add_noise(v, kNoiseFree, n), v);
}

TEST(Noise, MeasuredSnrMatches) {
  const GridSpec g;
  Rng r(31);
  const auto clean = render_scene(build_scene(r, 5), g).sequence;
  const double p = signal_power(clean);
  ASSERT_GT(p, 0.0);
  for (const double snr : {10.0, 20.0}) {
    Rng n(7);
    const auto noisy = add_noise(clean, snr, n);
    double e = 0.0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
      const double d = noisy.data()[i] - clean.data()[i];
      e += d * d;
    }
    e /= static_cast<double>(clean.size());
    EXPECT_NEAR(10.0 * std::log10(p / e), snr, 0.05);
  }
}

TEST(Noise, InvalidInputs) {
  const GridSpec g;
  const VelocitySequence zero(g);
  Rng n(1);
  EXPECT_THROW(add_noise(zero, 20.0, n), ParameterError);
  NoiseOptions allow;
  allow.allow_zero_signal = true;
  EXPECT_EQ(add_noise(zero, 20.0, n, allow), zero);
  Rng r(3);
  const auto v = render_scene(build_scene(r, 2), g).sequence;
  EXPECT_THROW(add_noise(v, 0.0, n), ParameterError);
  EXPECT_THROW(add_noise(v, -5.0, n), ParameterError);
  EXPECT_THROW(add_noise(v, std::nan(""), n), ParameterError);
}

TEST(Grid, Validation) {
  GridSpec g;
  g.frames = 0;
  EXPECT_THROW(validate_grid(g), ParameterError);
  g = GridSpec{};
  g.px_mm = -1.0;
  EXPECT_THROW(validate_grid(g), ParameterError);
  EXPECT_NO_THROW(validate_grid(GridSpec{}));
  EXPECT_DOUBLE_EQ(GridSpec{}.fov_width_mm(), 40.0);
  EXPECT_DOUBLE_EQ(GridSpec{}.duration_s(), 1.0);
}

TEST(Stored, FloatConversion) {
  const GridSpec g;
  Rng r(3);
  const auto v = render_scene(build_scene(r, 2), g).sequence;
  const StoredSequence s = to_stored(v);
  ASSERT_EQ(s.size(), v.size());
  for (std::size_t i = 0; i < v.size(); i += 997) {
    EXPECT_EQ(s.data()[i], static_cast<float>(v.data()[i]));
  }
}
