#include <gtest/gtest.h>

#include <cmath>

#include "wheelcon/analysis.hpp"
#include "wheelcon/prng.hpp"
#include "wheelcon/subjects.hpp"
#include "wheelcon/verify.hpp"

using namespace wheelcon;

TEST(Norms, Examples) {
  const auto n = norms(std::vector<double>{1, -2, 3});
  EXPECT_EQ(n.linf, 3.0);
  EXPECT_EQ(n.l1, 2.0);
  EXPECT_DOUBLE_EQ(n.l2, std::sqrt(14.0 / 3.0));
  const auto c = norms(std::vector<double>(17, -0.25));
  EXPECT_EQ(c.l1, 0.25);
  EXPECT_EQ(c.l2, 0.25);
  EXPECT_EQ(c.linf, 0.25);
  EXPECT_THROW(norms(std::vector<double>{}), std::invalid_argument);
}

TEST(Norms, InverterLog) {
  const auto cfg = SessionConfig::for_schedule(model_schedule(std::vector<double>(200, 1.0), 0));
  DelayedInverterSubject inv(3, SubjectContext::from(cfg));
  std::vector<double> xs;
  for (const auto& r : run_headless(cfg, inv).records) xs.push_back(r.x);
  EXPECT_EQ(norms(xs).linf, 3.0);
}

TEST(Norms, PowerMeanChainAndScaling) {
  Prng rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> x(1 + rng.below(200));
    for (auto& v : x) v = rng.uniform(-5, 5);
    const auto n = norms(x);
    EXPECT_LE(n.l1, n.l2 * (1 + 1e-12));
    EXPECT_LE(n.l2, n.linf * (1 + 1e-12));
    const double c = rng.uniform(-3, 3);
    std::vector<double> y(x);
    for (auto& v : y) v *= c;
    const auto m = norms(y);
    EXPECT_NEAR(m.l1, std::abs(c) * n.l1, 1e-12 * (1 + m.l1));
    EXPECT_NEAR(m.l2, std::abs(c) * n.l2, 1e-12 * (1 + m.l2));
    EXPECT_NEAR(m.linf, std::abs(c) * n.linf, 1e-12 * (1 + m.linf));
  }
}

TEST(Spearman, Basics) {
  const std::vector<double> a{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(spearman(a, std::vector<double>{10, 20, 30, 45}), 1.0);
  EXPECT_DOUBLE_EQ(spearman(a, std::vector<double>{4, 3, 2, 1}), -1.0);
  EXPECT_EQ(average_ranks(std::vector<double>{5, 1, 5, 2}), (std::vector<double>{3.5, 1, 3.5, 2}));
  EXPECT_THROW(spearman(a, std::vector<double>{1}), std::invalid_argument);
}

static SessionLog constant_blocks_log(const ParameterSchedule& sched,
                                      const std::vector<double>& per_block) {
  SessionLog log;
  for (std::int64_t t = 0; t < sched.end_tick(); ++t) {
    log.records.push_back({ticks_to_seconds(t), per_block[static_cast<std::size_t>(t / 3000)], 0});
  }
  return log;
}

TEST(BlockNorms, ConstantBlocksGiveTheirConstants) {
  const auto sched = build_game(GameId::kGame2, 1);
  const std::vector<double> vals{0.5, -1.25, 2, 0, 3.5, -0.75};
  const auto rep = block_norms(constant_blocks_log(sched, vals), sched);
  EXPECT_EQ(rep.param_name, "T_act");
  ASSERT_EQ(rep.rows.size(), 6u);
  const std::vector<std::string> params{"0", "0.15", "0.3", "0.45", "0.6", "0.75"};
  for (std::size_t b = 0; b < 6; ++b) {
    EXPECT_EQ(rep.rows[b].param, params[b]);
    EXPECT_EQ(rep.rows[b].norms.l1, std::abs(vals[b]));
    EXPECT_EQ(rep.rows[b].norms.l2, std::abs(vals[b]));
    EXPECT_EQ(rep.rows[b].norms.linf, std::abs(vals[b]));
    EXPECT_EQ(rep.rows[b].n, 2000u);
    EXPECT_EQ(rep.rows[b].start, b * 30.0 + 5);
    EXPECT_EQ(rep.rows[b].end, b * 30.0 + 25);
    EXPECT_FALSE(rep.rows[b].flagged);
  }
}

TEST(BlockNorms, Game5UsesLabeledScenarios) {
  const auto sched = build_game(GameId::kGame5, 1);
  SessionLog log;
  for (std::int64_t t = 0; t < sched.end_tick(); ++t) log.records.push_back({ticks_to_seconds(t), 1, 0});
  const auto rep = block_norms(log, sched);
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_EQ(rep.rows[2].param, "trail_bumps");
  EXPECT_EQ(rep.rows[0].n, 5000u);
}

TEST(BlockNorms, ShortBlockFlagged) {
  const auto sched = build_game(GameId::kGame2, 1);
  const auto rep = block_norms(constant_blocks_log(sched, {1, 1, 1, 1, 1, 1}), sched, 15.0);
  for (const auto& r : rep.rows) {
    EXPECT_TRUE(r.flagged);
    EXPECT_EQ(r.n, 3000u);
  }
  EXPECT_NE(report_text(rep).find("# flagged=block 0"), std::string::npos);
  EXPECT_THROW(block_norms(SessionLog{}, sched, -1), std::invalid_argument);
}

TEST(MovementTimes, Definition) {
  FittsSchedule f;
  f.jumps = {{0.0, 0.5, 0.1}, {10.0, 0.9, 0.1}, {20.0, 0.1, 0.1}};
  SessionLog log;
  log.header.set("game", "fitts");
  log.header.set("screen_scale", "1");
  for (std::int64_t t = 0; t < 3000; ++t) {
    const double s = ticks_to_seconds(t);
    double bar = 0.5;
    if (s >= 10.0) bar = std::min(0.9, 0.5 + (s - 10.0) * 0.5);
    if (s >= 20.0) bar = 0.9;
    const double center = f.zone_at(s).center;
    log.records.push_back({s, bar - center, 0});
  }
  const auto mts = movement_times(log, f);
  ASSERT_EQ(mts.size(), 3u);
  EXPECT_EQ(*mts[0].mt, 0.0);
  // Constant-velocity driver: d - w/2 = 0.35 at 0.5/s, within a tick.
  EXPECT_NEAR(*mts[1].mt, 0.7, 0.01 + 1e-9);
  EXPECT_FALSE(mts[2].mt.has_value());
  const auto s = summarize(mts);
  EXPECT_EQ(s.completed, 2u);
  EXPECT_NEAR(s.censoring_rate, 1.0 / 3.0, 1e-12);
  log.header.set("game", "2");
  EXPECT_THROW(movement_times(log, f), std::invalid_argument);
}

TEST(MovementTimes, EntryAtKnownTime) {
  FittsSchedule f;
  f.jumps = {{0.0, 0.5, 0.1}, {10.0, 0.8, 0.1}};
  SessionLog log;
  log.header.set("game", "fitts");
  log.header.set("screen_scale", "1");
  for (std::int64_t t = 0; t < 1500; ++t) {
    const double s = ticks_to_seconds(t);
    const double bar = s >= 10.8 ? 0.8 : 0.5;
    log.records.push_back({s, bar - f.zone_at(s).center, 0});
  }
  EXPECT_DOUBLE_EQ(*movement_times(log, f)[1].mt, 0.8);
}

TEST(Export, ColumnsAndDeterminism) {
  const auto sched = build_game(GameId::kGame3, 1);
  const auto cfg = SessionConfig::for_schedule(sched);
  NoisyHumanParams p;
  NoisyHumanSubject h(p, SubjectContext::from(cfg));
  const auto log = run_headless(cfg, h);
  const auto rep = block_norms(log, sched);
  const auto dir = std::filesystem::temp_directory_path() / "wheelcon_export";
  std::filesystem::create_directories(dir);
  export_report(rep, dir / "a.csv");
  export_report(rep, dir / "b.csv");
  EXPECT_EQ(read_text_file(dir / "a.csv"), read_text_file(dir / "b.csv"));
  const auto text = read_text_file(dir / "a.csv");
  EXPECT_NE(text.find("\nblock,param,L1,L2,Linf,n\n"), std::string::npos);
  EXPECT_NE(text.find("L1-mean"), std::string::npos);
  EXPECT_NE(text.find("L2-rms"), std::string::npos);
  export_report(log, dir / "log.csv");
  const auto body = read_text_file(dir / "log.csv");
  EXPECT_NE(body.find("\nt,x,u\n"), std::string::npos);
  for (const auto& r : rep.rows) {
    EXPECT_LE(r.norms.l1, r.norms.l2);
    EXPECT_LE(r.norms.l2, r.norms.linf);
  }
  EXPECT_THROW(export_report(rep, "/nonexistent-dir/x.csv"), IoError);
}
