#include <gtest/gtest.h>

#include <set>
#include <string>

#include "wheelcon/script.hpp"

using namespace wheelcon;

static ScriptErrorKind kind_of(const std::string& text) {
  try {
    parse_script(text);
  } catch (const ScriptError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for: " << text;
  return ScriptErrorKind::kEmpty;
}

TEST(Parse, FieldMapping) {
  const auto s = parse_script("0.01,0.6,10,4,0.15,0.2,5\n");
  ASSERT_EQ(s.rows().size(), 1u);
  const auto& r = s.rows()[0];
  EXPECT_EQ(r.time, 0.01);
  EXPECT_EQ(r.trail, 0.6);
  EXPECT_EQ(r.bump, 10);
  EXPECT_EQ(r.rate_act, 4);
  EXPECT_EQ(r.delay_act, 0.15);
  EXPECT_EQ(r.delay_vis, 0.2);
  EXPECT_EQ(r.rate_vis, 5);
}

TEST(Parse, SixFieldLineRejectedWithLineNumber) {
  try {
    parse_script("# game=custom\n0,0.5,0,10,0,0,10\n0.01,6,10,-1,30,0.2\n");
    FAIL();
  } catch (const ScriptError& e) {
    EXPECT_EQ(e.kind(), ScriptErrorKind::kFieldCount);
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Parse, DistinctErrorKinds) {
  std::set<ScriptErrorKind> kinds;
  auto expect = [&](const std::string& text, ScriptErrorKind k) {
    EXPECT_EQ(kind_of(text), k) << text;
    kinds.insert(k);
  };
  expect("", ScriptErrorKind::kEmpty);
  expect("# game\n0,0.5,0,10,0,0,10\n", ScriptErrorKind::kHeader);
  expect("0,0.5,0,10,0,0\n", ScriptErrorKind::kFieldCount);
  expect("0,abc,0,10,0,0,10\n", ScriptErrorKind::kNonNumeric);
  expect("0.5,0.5,0,10,0,0,10\n0.5,0.5,0,10,0,0,10\n", ScriptErrorKind::kNonMonotonicTime);
  expect("0.005,0.5,0,10,0,0,10\n", ScriptErrorKind::kTimeResolution);
  expect("0,0.5,0,10,0,1,10\n", ScriptErrorKind::kVisionDelayRange);
  expect("0,0.5,0,10,0,-1.5,10\n", ScriptErrorKind::kVisionDelayRange);
  expect("0,0.5,0,10,-0.1,0,10\n", ScriptErrorKind::kActionDelayRange);
  expect("0,0.5,0,10,0,0,11\n", ScriptErrorKind::kVisionRateRange);
  expect("0,0.5,0,10,0,0,2.5\n", ScriptErrorKind::kVisionRateRange);
  expect("0,0.5,0,0,0,0,10\n", ScriptErrorKind::kActionRateRange);
  expect("0,0.5,101,10,0,0,10\n", ScriptErrorKind::kBumpRange);
  expect("0,1.5,0,10,0,0,10\n", ScriptErrorKind::kTrailRange);
  expect("# mode=model\n0,-1.5,0,10,0,0,10\n", ScriptErrorKind::kTrailRange);
  EXPECT_EQ(kinds.size(), 12u);
}

TEST(Parse, HeaderAndBoundaries) {
  const auto s = parse_script("# game=2 seed=7\n0,0.5,-100,1,0,-1,1\n0.5,0.4,100,10,2,0.99,10\n");
  EXPECT_EQ(s.metadata().get_or("game", ""), "2");
  EXPECT_EQ(s.metadata().get_or("seed", ""), "7");
  EXPECT_EQ(s.rows().size(), 2u);
  EXPECT_EQ(kind_of("0,0.5,0,10,0,0,10\n# late=1\n"), ScriptErrorKind::kHeader);
}

TEST(Sample, HoldSemantics) {
  const auto s = parse_script("0,0.5,0,10,0,0,10\n0.5,0.5,0,3,0,0,10\n");
  EXPECT_EQ(s.sample(30).rate_act, 10);
  EXPECT_EQ(s.sample(50).rate_act, 3);
  EXPECT_EQ(s.sample(5000).rate_act, 3);
  const auto late = parse_script("0.2,0.5,0,4,0,0,10\n0.3,0.5,0,5,0,0,10\n");
  EXPECT_EQ(late.sample(0).rate_act, 4);
  EXPECT_EQ(late.end_tick(), 31);
}

TEST(Write, RoundTripOnAllBuilders) {
  for (auto id : {GameId::kGame1, GameId::kGame2, GameId::kGame3, GameId::kGame4, GameId::kGame5,
                  GameId::kFitts}) {
    const auto s = build_game(id, 7);
    const auto text = write_script(s);
    const auto back = parse_script(text);
    EXPECT_EQ(back, s) << to_string(id);
    EXPECT_EQ(write_script(back), text);
  }
}

TEST(Write, CanonicalForm) {
  const auto s = parse_script("# a=1\n0.000,0.1234567891,+5,4,0.150,0.2,5\n");
  EXPECT_EQ(write_script(s), "# a=1\n0,0.123457,5,4,0.15,0.2,5\n");
  EXPECT_EQ(write_script(parse_script(write_script(s))), write_script(s));
}

TEST(Builders, Game1) {
  const auto s = build_game(GameId::kGame1, 1);
  EXPECT_EQ(s.end_tick(), 39000);
  const std::vector<double> expect{-1.0, -0.75, -0.5, -0.4, -0.3, -0.2, -0.1,
                                   0.0,  0.1,   0.2,  0.3,  0.4,  0.5};
  for (std::size_t b = 0; b < expect.size(); ++b) {
    for (std::int64_t t = b * 3000; t < static_cast<std::int64_t>((b + 1) * 3000); t += 700) {
      EXPECT_EQ(s.sample(t).delay_vis, expect[b]);
      EXPECT_EQ(s.sample(t).bump, 0.0);
    }
  }
}

TEST(Builders, Games2To4) {
  const auto g2 = build_game(GameId::kGame2, 1);
  EXPECT_EQ(g2.end_tick(), 18000);
  const std::vector<double> delays{0, 0.15, 0.30, 0.45, 0.60, 0.75};
  for (std::size_t b = 0; b < 6; ++b) EXPECT_EQ(g2.sample(b * 3000 + 10).delay_act, delays[b]);
  const auto g3 = build_game(GameId::kGame3, 1);
  const auto g4 = build_game(GameId::kGame4, 1);
  EXPECT_EQ(g3.end_tick(), 21000);
  EXPECT_EQ(g4.end_tick(), 21000);
  for (int b = 0; b < 7; ++b) {
    EXPECT_EQ(g3.sample(b * 3000 + 5).rate_vis, b + 1);
    EXPECT_EQ(g3.sample(b * 3000 + 5).rate_act, 10);
    EXPECT_EQ(g4.sample(b * 3000 + 5).rate_act, b + 1);
    EXPECT_EQ(g4.sample(b * 3000 + 5).rate_vis, 10);
  }
}

TEST(Builders, Game5) {
  const auto s = build_game(GameId::kGame5, 4);
  EXPECT_EQ(s.end_tick(), 19500);
  const auto blocks = decode_blocks(*s.metadata().get("blocks"));
  ASSERT_EQ(blocks.size(), 3u);
  EXPECT_EQ(blocks[0].label, "bumps");
  EXPECT_EQ(blocks[1].label, "trail");
  EXPECT_EQ(blocks[2].label, "trail_bumps");
  EXPECT_EQ(blocks[0].start, 5.0);
  EXPECT_EQ(blocks[1].start, 70.0);
  EXPECT_EQ(blocks[2].start, 135.0);
  for (std::int64_t i = 0; i < 6000; ++i) {
    const auto& a = s.sample(500 + i);
    const auto& b = s.sample(7000 + i);
    const auto& c = s.sample(13500 + i);
    ASSERT_EQ(c.bump, a.bump);
    ASSERT_EQ(c.trail, b.trail);
    ASSERT_EQ(a.trail, 0.5);
    ASSERT_EQ(b.bump, 0.0);
    ASSERT_EQ(a.delay_vis, -1.0);
    ASSERT_EQ(a.rate_act, 10);
    ASSERT_EQ(a.rate_vis, 10);
    ASSERT_EQ(a.delay_act, 0.0);
  }
  for (std::int64_t t : {0, 499, 6500, 6999, 13000, 13499}) {
    EXPECT_EQ(s.sample(t).bump, 0.0);
    EXPECT_EQ(s.sample(t).trail, 0.5);
  }
}

TEST(Builders, FrozenHashes) {
  EXPECT_EQ(hex64(schedule_hash(build_game(GameId::kGame1, 7))), "3d59374514957605");
  EXPECT_EQ(hex64(schedule_hash(build_game(GameId::kGame2, 7))), "163fe6265d9ff13b");
  EXPECT_EQ(hex64(schedule_hash(build_game(GameId::kGame3, 7))), "1a96e44a1bb7927f");
  EXPECT_EQ(hex64(schedule_hash(build_game(GameId::kGame4, 7))), "a8e8f1324b69e4dc");
  EXPECT_EQ(hex64(schedule_hash(build_game(GameId::kGame5, 7))), "9b222d695422c0d1");
  EXPECT_EQ(hex64(schedule_hash(build_game(GameId::kFitts, 7))), "287b99975fd5a63f");
}

TEST(Builders, FittsRegeneratesFromHeader) {
  const auto s = build_game(GameId::kFitts, 3);
  const auto f = fitts_from_schedule(parse_script(write_script(s)));
  ASSERT_TRUE(f.has_value());
  for (std::int64_t t = 0; t < s.end_tick(); t += 37) {
    EXPECT_EQ(canonical(f->zone_at(ticks_to_seconds(t)).center), s.sample(t).trail);
  }
  EXPECT_FALSE(fitts_from_schedule(build_game(GameId::kGame2, 3)).has_value());
  EXPECT_THROW(parse_game_id("6"), std::invalid_argument);
}

TEST(Builders, SliceKeepsBlocks) {
  const auto s = build_game(GameId::kGame5, 2);
  const auto part = slice_schedule(s, 0, 65);
  EXPECT_EQ(part.end_tick(), 6500);
  const auto blocks = decode_blocks(*part.metadata().get("blocks"));
  ASSERT_EQ(blocks.size(), 1u);
  EXPECT_EQ(blocks[0].label, "bumps");
}
