#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "wheelcon/prng.hpp"
#include "wheelcon/signal.hpp"

using namespace wheelcon;

static std::vector<double> run_line(DelayLine line, const std::vector<double>& in) {
  std::vector<double> out;
  for (double v : in) out.push_back(line.push(v));
  return out;
}

TEST(DelayLine, Examples) {
  EXPECT_EQ(run_line(DelayLine(0), {1, 2, 3}), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(run_line(DelayLine(3), {1, 2, 3, 4, 5}), (std::vector<double>{0, 0, 0, 1, 2}));
  EXPECT_EQ(DelayLine(seconds_to_ticks(0.15)).delay_ticks(), 15);
  EXPECT_THROW(DelayLine(-1), std::invalid_argument);
}

TEST(DelayLine, BufferLengthIsDelay) {
  DelayLine d(4);
  for (int i = 0; i < 10; ++i) {
    d.push(i);
    EXPECT_EQ(d.pending().size(), 4u);
  }
  EXPECT_EQ(d.pending(), (std::vector<double>{6, 7, 8, 9}));
}

TEST(DelayLine, CompositionAddsDelays) {
  Prng rng(2);
  for (int a = 0; a <= 5; ++a) {
    for (int b = 0; b <= 5; ++b) {
      DelayLine da(a), db(b), dab(a + b);
      for (int i = 0; i < 60; ++i) {
        const double v = rng.uniform();
        EXPECT_EQ(db.push(da.push(v)), dab.push(v));
      }
    }
  }
}

TEST(DelayLine, ResizeKeepsQueuedSamples) {
  DelayLine d(2);
  d.push(1);
  d.push(2);
  d.resize(4);
  EXPECT_EQ(d.pending(), (std::vector<double>{0, 0, 1, 2}));
  d.resize(1);
  EXPECT_EQ(d.pending(), (std::vector<double>{2}));
  EXPECT_EQ(d.push(3), 2);
}

TEST(QuantizeVision, Examples) {
  EXPECT_EQ(quantize_vision(0.3, 1), 0.25);
  EXPECT_EQ(quantize_vision(0.6, 2), 0.625);
  EXPECT_EQ(quantize_vision(0.75, 1), 0.75);
  EXPECT_EQ(quantize_vision(1.0, 3), 0.9375);
  EXPECT_EQ(quantize_vision(-0.2, 1), 0.25);
  EXPECT_EQ(quantize_vision(1.7, 1), 0.75);
  EXPECT_THROW(quantize_vision(0.5, 0), std::invalid_argument);
  EXPECT_THROW(quantize_vision(0.5, 11), std::invalid_argument);
}

TEST(QuantizeVision, Properties) {
  Prng rng(8);
  for (int bits = 1; bits <= 10; ++bits) {
    const auto levels = vision_levels(bits);
    ASSERT_EQ(levels.size(), std::size_t{1} << bits);
    const std::set<double> level_set(levels.begin(), levels.end());
    for (int i = 0; i < 2000; ++i) {
      const double p = rng.uniform();
      const double q = rng.uniform();
      const double qp = quantize_vision(p, bits);
      EXPECT_EQ(quantize_vision(qp, bits), qp);
      EXPECT_LE(std::abs(qp - p), std::ldexp(1.0, -(bits + 1)));
      EXPECT_TRUE(level_set.count(qp));
      if (p <= q) {
        EXPECT_LE(qp, quantize_vision(q, bits));
      }
    }
  }
}

TEST(QuantizeAction, Examples) {
  const double s = 2.0;
  EXPECT_EQ(quantize_action(30, 1, 90, s), s);
  EXPECT_EQ(quantize_action(-30, 1, 90, s), -s);
  EXPECT_EQ(quantize_action(0, 1, 90, s), s);
  const auto levels = action_levels(3, s);
  EXPECT_EQ(levels, (std::vector<double>{-2, -1.5, -1, -0.5, 0.5, 1, 1.5, 2}));
  // Tie between 0.5 and 1 at 0.75 goes to the larger level.
  EXPECT_EQ(quantize_action(0.75 / s * 90, 3, 90, s), 1.0);
  EXPECT_EQ(quantize_action(500, 3, 90, s), 2.0);
  EXPECT_THROW(quantize_action(1, 3, 0, s), std::invalid_argument);
}

TEST(QuantizeAction, OutputSetHasTwoToTheRValuesAndNoZero) {
  Prng rng(4);
  for (int bits = 1; bits <= 10; ++bits) {
    const auto levels = action_levels(bits, 1.0);
    const std::set<double> level_set(levels.begin(), levels.end());
    ASSERT_EQ(level_set.size(), std::size_t{1} << bits);
    EXPECT_FALSE(level_set.count(0.0));
    std::set<double> seen;
    for (int i = 0; i < 20000; ++i) {
      const double out = quantize_action(rng.uniform(-100, 100), bits, 90, 1.0);
      EXPECT_TRUE(level_set.count(out));
      seen.insert(out);
    }
    if (bits <= 6) {
      EXPECT_EQ(seen.size(), level_set.size());
    }
  }
}

TEST(VisibleSegment, Examples) {
  std::vector<double> trail(1000);
  for (std::size_t i = 0; i < trail.size(); ++i) trail[i] = static_cast<double>(i);
  auto ahead = visible_segment(trail, 500, {-1.0, 2.0});
  EXPECT_EQ(ahead.back().tick, 600);
  EXPECT_EQ(ahead.front().tick, 300);
  auto now = visible_segment(trail, 500, {0.0, 2.0});
  EXPECT_EQ(now.back().tick, 500);
  auto late = visible_segment(trail, 500, {0.5, 2.0});
  EXPECT_EQ(late.back().tick, 450);
  EXPECT_EQ(late.back().pos, 450.0);
}

TEST(VisibleSegment, ClampsToTrackBoundary) {
  std::vector<double> trail{0.1, 0.2, 0.3};
  auto seg = visible_segment(trail, 1, {-0.05, 0.02});
  ASSERT_EQ(seg.size(), 8u);
  EXPECT_EQ(seg.front().tick, -1);
  EXPECT_EQ(seg.front().pos, 0.1);
  EXPECT_EQ(seg.back().tick, 6);
  EXPECT_EQ(seg.back().pos, 0.3);
}
