#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <string>
#include <vector>

#include "wheelcon/analysis.hpp"
#include "wheelcon/engine.hpp"
#include "wheelcon/minimax.hpp"
#include "wheelcon/plant.hpp"
#include "wheelcon/prng.hpp"
#include "wheelcon/script.hpp"
#include "wheelcon/subjects.hpp"

namespace wheelcon {

// ---------------------------------------------------------------------------
// Delay law: with T ticks of delay the best worst-case error is exactly T.

/// Model-mode schedule with r(t) given per tick.
inline ParameterSchedule model_schedule(const std::vector<double>& r, std::int64_t action_delay,
                                        std::uint64_t seed = 0) {
  std::vector<ScheduleRow> rows;
  rows.reserve(r.size());
  for (std::size_t t = 0; t < r.size(); ++t) {
    ScheduleRow row;
    row.time = ticks_to_seconds(static_cast<std::int64_t>(t));
    row.trail = r[t];
    row.rate_act = kMaxRateBits;
    row.rate_vis = kMaxRateBits;
    row.delay_act = ticks_to_seconds(action_delay);
    row.delay_vis = -1.0;
    rows.push_back(row);
  }
  Metadata m;
  m.set("game", "model");
  m.set("seed", std::to_string(seed));
  m.set("prng", std::string(kPrngId));
  m.set("mode", "model");
  return ParameterSchedule(std::move(m), std::move(rows));
}

/// +-1 square wave with seeded half-periods of 1..max_half ticks.
inline std::vector<double> square_wave(std::size_t n, std::uint64_t seed, int max_half = 20) {
  Prng rng(stream_seed(seed, Stream::kTrail));
  std::vector<double> r;
  r.reserve(n);
  double level = rng.coin() ? 1.0 : -1.0;
  while (r.size() < n) {
    const auto len = rng.below(static_cast<std::uint64_t>(max_half)) + 1;
    for (std::uint64_t i = 0; i < len && r.size() < n; ++i) r.push_back(level);
    level = -level;
  }
  return r;
}

/// Where the T ticks of delay live: inside the subject, or in the action channel.
enum class DelayPlacement { kSubject, kChannel };

inline const char* to_string(DelayPlacement p) {
  return p == DelayPlacement::kSubject ? "subject" : "channel";
}

struct DelayRow {
  std::int64_t delay = 0;
  DelayPlacement placement = DelayPlacement::kSubject;
  double sup_x_constant = 0.0;
  double sup_x_square = 0.0;
  double sup_u = 0.0;
  bool matches_telescoped = false;
  bool pass = false;
};

struct DelayOptions {
  std::int64_t max_delay = 10;
  std::size_t ticks = 300;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
};

namespace detail {

struct DelayRun {
  double sup_x = 0.0;
  double sup_u = 0.0;
  bool matches = true;
};

inline DelayRun run_inverter(const std::vector<double>& r, std::int64_t delay,
                             DelayPlacement placement, std::uint64_t seed) {
  const std::int64_t channel = placement == DelayPlacement::kChannel ? delay : 0;
  const std::int64_t internal = placement == DelayPlacement::kSubject ? delay : 0;
  const SessionConfig cfg = SessionConfig::for_schedule(model_schedule(r, channel, seed));
  check_inverter_warning(cfg.schedule, internal, cfg.lookbehind);
  DelayedInverterSubject subject(internal, SubjectContext::from(cfg));
  const SessionLog log = run_headless(cfg, subject);
  const auto expected = telescoped_error(r, delay);
  DelayRun out;
  out.matches = !log.aborted() && log.records.size() == r.size();
  for (std::size_t t = 0; t < log.records.size(); ++t) {
    out.sup_x = std::max(out.sup_x, std::abs(log.records[t].x));
    out.sup_u = std::max(out.sup_u, std::abs(log.records[t].u));
    if (log.records[t].x != expected[t]) out.matches = false;
  }
  return out;
}

}  // namespace detail

/// Runs the delayed inverter against r = 1 and seeded square waves for every
/// T in [0, max_delay], with the delay in the subject and in the channel.
inline std::vector<DelayRow> verify_delay(const DelayOptions& opt = {}) {
  std::vector<DelayRow> rows;
  const std::vector<double> ones(opt.ticks, 1.0);
  for (std::int64_t T = 0; T <= opt.max_delay; ++T) {
    for (auto placement : {DelayPlacement::kSubject, DelayPlacement::kChannel}) {
      DelayRow row;
      row.delay = T;
      row.placement = placement;
      const auto c = detail::run_inverter(ones, T, placement, 0);
      row.sup_x_constant = c.sup_x;
      row.sup_u = c.sup_u;
      row.matches_telescoped = c.matches;
      for (auto seed : opt.seeds) {
        const auto s = detail::run_inverter(square_wave(opt.ticks, seed), T, placement, seed);
        row.sup_x_square = std::max(row.sup_x_square, s.sup_x);
        row.sup_u = std::max(row.sup_u, s.sup_u);
        row.matches_telescoped = row.matches_telescoped && s.matches;
      }
      const double t = static_cast<double>(T);
      row.pass = row.sup_x_constant == t && row.sup_x_square <= t && row.sup_u == 1.0 &&
                 row.matches_telescoped;
      rows.push_back(row);
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Rate bound: an R-bit controller cannot keep the worst case below 2^(1-R).

struct RateRow {
  int bits = 0;
  double scale = 0.0;
  double value = 0.0;
  double bound = 0.0;
  double sup_u = 0.0;
  double effort_bound = 0.0;
  std::size_t states = 0;
  bool pass = false;
};

struct RateOptions {
  std::vector<int> bits{1, 2};
  int horizon = 6;
  std::vector<double> grid{-1.0, 1.0};
  double tolerance = 1e-9;
};

inline std::vector<RateRow> verify_rate(const RateOptions& opt = {}) {
  std::vector<RateRow> rows;
  for (int bits : opt.bits) {
    check_rate_bits(bits);
    const auto best = search_level_scale(bits, opt.horizon, opt.grid);
    RateRow row;
    row.bits = bits;
    row.scale = best.scale;
    row.value = best.game.value;
    row.bound = rate_error_bound(bits);
    row.sup_u = best.game.worst_case_sup_u;
    row.effort_bound = rate_effort_bound(bits);
    row.states = best.game.states;
    row.pass = row.value >= row.bound - opt.tolerance;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Seed-averaged block norms of the noisy-human subject over a game.

struct SweepRow {
  std::string param;
  Norms mean;
};

struct SweepOptions {
  std::vector<std::uint64_t> seeds;
  NoisyHumanParams human;
  GameOptions game;
  double trim = 5.0;

  SweepOptions() {
    for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
  }
};

inline std::vector<SweepRow> sweep_norms(GameId id, const SweepOptions& opt = {}) {
  if (opt.seeds.empty()) throw std::invalid_argument("sweep_norms: no seeds");
  std::vector<std::future<NormReport>> runs;
  for (auto seed : opt.seeds) {
    runs.push_back(std::async(std::launch::async, [&, seed] {
      const auto sched = build_game(id, seed, opt.game);
      const auto cfg = SessionConfig::for_schedule(sched);
      NoisyHumanParams p = opt.human;
      p.seed = seed;
      NoisyHumanSubject subject(p, SubjectContext::from(cfg));
      const auto log = run_headless(cfg, subject);
      if (log.aborted()) throw std::runtime_error("sweep_norms: run aborted");
      return block_norms(log, sched, opt.trim);
    }));
  }
  std::vector<SweepRow> out;
  for (auto& f : runs) {
    const auto rep = f.get();
    if (out.empty()) {
      for (const auto& r : rep.rows) out.push_back({r.param, {}});
    }
    for (std::size_t b = 0; b < rep.rows.size(); ++b) {
      out[b].mean.l1 += rep.rows[b].norms.l1;
      out[b].mean.l2 += rep.rows[b].norms.l2;
      out[b].mean.linf += rep.rows[b].norms.linf;
    }
  }
  const auto n = static_cast<double>(opt.seeds.size());
  for (auto& r : out) {
    r.mean.l1 /= n;
    r.mean.l2 /= n;
    r.mean.linf /= n;
  }
  return out;
}

/// Spearman correlation of block Linf against the block parameter.
inline double delay_trend(const std::vector<SweepRow>& rows) {
  std::vector<double> param, linf;
  for (const auto& r : rows) {
    param.push_back(parse_number(r.param).value_or(std::nan("")));
    linf.push_back(r.mean.linf);
  }
  return spearman(param, linf);
}

/// Non-increasing in the block order, except that neighbours both within
/// `band` of the last block count as the plateau; the block at `plateau_at`
/// must itself lie within `band` of the last block.
inline bool rate_trend(std::span<const double> values, std::size_t plateau_at, double band = 0.1) {
  if (values.empty() || plateau_at >= values.size()) return false;
  const double last = values.back();
  auto on_plateau = [&](double v) { return std::abs(v - last) <= band * last; };
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[i - 1] && !(on_plateau(values[i]) && on_plateau(values[i - 1]))) {
      return false;
    }
  }
  return on_plateau(values[plateau_at]);
}

inline std::vector<double> column(const std::vector<SweepRow>& rows, double Norms::*field) {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.mean.*field);
  return out;
}

}  // namespace wheelcon
