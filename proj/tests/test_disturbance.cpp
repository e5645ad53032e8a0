#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "wheelcon/disturbance.hpp"

using namespace wheelcon;

TEST(Trail, StaysInsideMargins) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto t = gen_trail(120.0, seed);
    for (double p : t.samples) {
      ASSERT_GE(p, 0.1 - 1e-12);
      ASSERT_LE(p, 0.9 + 1e-12);
    }
  }
}

TEST(Trail, DegenerateDuration) {
  const auto t = gen_trail(0.01, 3);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0], 0.5);
}

TEST(Trail, ConstantSpeedSquareWaveRate) {
  const auto t = gen_trail(60.0, 9, {0.3, 0.1, 0.1});
  for (std::size_t i = 1; i < t.size(); ++i) {
    EXPECT_NEAR(std::abs(t[i] - t[i - 1]), 0.003, 1e-12);
  }
}

TEST(Trail, DeterministicAndFrozen) {
  const auto a = gen_trail(10.0, 42);
  const auto b = gen_trail(10.0, 42);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_NE(a.samples, gen_trail(10.0, 43).samples);
}

TEST(Trail, RejectsBadParameters) {
  EXPECT_THROW(gen_trail(0.0, 1), std::invalid_argument);
  EXPECT_THROW(gen_trail(1.0, 1, {0.0, 0.1, 0.1}), std::invalid_argument);
  EXPECT_THROW(gen_trail(1.0, 1, {0.3, 0.5, 0.1}), std::invalid_argument);
  // One tick of travel must fit inside the band twice over.
  EXPECT_THROW(gen_trail(1.0, 1, {45.0, 0.1, 0.1}), std::invalid_argument);
}

TEST(Trail, CalibratedSpeed) {
  // A 75 degree hold at k moves 75 k per tick, i.e. 7500 k per second.
  EXPECT_DOUBLE_EQ(calibrated_trail_speed(4e-5, 75.0), 0.3);
}

TEST(Bumps, BinaryConstantPerSegment) {
  const auto b = gen_bumps(20.0, 5);
  for (std::size_t i = 0; i < b.size(); ++i) {
    ASSERT_TRUE(b[i] == 100.0 || b[i] == -100.0);
    if (i % 10 != 0) {
      ASSERT_EQ(b[i], b[i - 1]);
    }
  }
  EXPECT_EQ(gen_bumps(20.0, 5).samples, b.samples);
}

TEST(Bumps, UnbiasedMean) {
  const auto b = gen_bumps(1000.0, 17);  // 10^4 segments
  double sum = 0;
  for (std::size_t i = 0; i < b.size(); i += 10) sum += b[i];
  EXPECT_LE(std::abs(sum / 10000.0), 5.0);
}

TEST(Bumps, IndependentOfTrail) {
  const auto b = gen_bumps(1000.0, 23);
  const auto t = gen_trail(1000.0, 23);
  double sxy = 0, sx = 0, sy = 0, sxx = 0, syy = 0;
  const double n = 10000;
  for (std::size_t i = 10; i < b.size(); i += 10) {
    const double x = b[i] > 0 ? 1.0 : -1.0;
    const double y = t[i] > t[i - 1] ? 1.0 : -1.0;
    sxy += x * y;
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
  }
  const double corr = (sxy - sx * sy / n) / std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
  EXPECT_LT(std::abs(corr), 0.05);
}

TEST(Bumps, AlternateAndSegmentChecks) {
  const auto b = gen_bumps(1.0, 1, {50.0, 0.1, true});
  for (std::size_t i = 10; i < b.size(); i += 10) EXPECT_EQ(b[i], -b[i - 10]);
  EXPECT_THROW(gen_bumps(1.0, 1, {100.0, 0.015, false}), std::invalid_argument);
  EXPECT_THROW(gen_bumps(1.0, 1, {0.0, 0.1, false}), std::invalid_argument);
}

TEST(Fitts, SingleElementLists) {
  const auto f = gen_fitts(120.0, 3, {0.05}, {0.4});
  ASSERT_GT(f.jumps.size(), 10u);
  for (std::size_t i = 1; i < f.jumps.size(); ++i) {
    EXPECT_NEAR(std::abs(f.jumps[i].center - f.jumps[i - 1].center), 0.4, 1e-12);
    EXPECT_EQ(f.jumps[i].width, 0.05);
    const double gap = f.jumps[i].time - f.jumps[i - 1].time;
    EXPECT_GE(gap, 3.0 - 1e-9);
    EXPECT_LE(gap, 6.0 + 1e-9);
  }
}

TEST(Fitts, ZonesOnScreenAndDeterministic) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto f = gen_fitts(300.0, seed, {0.05, 0.1, 0.2}, {0.1, 0.3});
    for (std::size_t i = 0; i < f.jumps.size(); ++i) {
      const auto& z = f.jumps[i];
      EXPECT_GE(z.center - z.width / 2, -1e-12);
      EXPECT_LE(z.center + z.width / 2, 1.0 + 1e-12);
      if (i) {
        EXPECT_NE(z.center, f.jumps[i - 1].center);
      }
    }
    const auto g = gen_fitts(300.0, seed, {0.05, 0.1, 0.2}, {0.1, 0.3});
    ASSERT_EQ(g.jumps.size(), f.jumps.size());
    for (std::size_t i = 0; i < f.jumps.size(); ++i) {
      EXPECT_EQ(g.jumps[i].time, f.jumps[i].time);
      EXPECT_EQ(g.jumps[i].center, f.jumps[i].center);
    }
  }
}

TEST(Fitts, RejectsUnrealizable) {
  EXPECT_THROW(gen_fitts(10.0, 1, {0.5}, {0.6}), std::invalid_argument);
  EXPECT_THROW(gen_fitts(10.0, 1, {}, {0.2}), std::invalid_argument);
  EXPECT_THROW(gen_fitts(60.0, 1, {0.6}, {0.3}), std::invalid_argument);
}
