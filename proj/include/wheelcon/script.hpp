#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "wheelcon/disturbance.hpp"
#include "wheelcon/plant.hpp"
#include "wheelcon/prng.hpp"
#include "wheelcon/signal.hpp"

namespace wheelcon {

// ---------------------------------------------------------------------------
// Canonical numbers

/// Value columns are written with at most 6 significant digits, locale-free.
inline std::string format_number(double v, int precision = 6) {
  if (v == 0.0) v = 0.0;  // folds -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general,
                           precision);
  return std::string(buf, res.ptr);
}

/// Shortest representation that reads back to the same double.
inline std::string format_exact(double v) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_number(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

/// The double that format_number(v) reads back as.
inline double canonical(double v) { return *parse_number(format_number(v)); }

// ---------------------------------------------------------------------------
// Schedule types

struct ScheduleRow {
  double time = 0.0;
  double trail = 0.5;
  double bump = 0.0;
  int rate_act = 10;
  double delay_act = 0.0;
  double delay_vis = 0.0;
  int rate_vis = 10;

  friend bool operator==(const ScheduleRow&, const ScheduleRow&) = default;
};

/// Ordered key=value pairs carried in the '#' header line.
class Metadata {
 public:
  void set(std::string key, std::string value) {
    for (auto& [k, v] : entries_) {
      if (k == key) {
        v = std::move(value);
        return;
      }
    }
    entries_.emplace_back(std::move(key), std::move(value));
  }

  std::optional<std::string> get(std::string_view key) const {
    for (const auto& [k, v] : entries_) {
      if (k == key) return v;
    }
    return std::nullopt;
  }

  std::string get_or(std::string_view key, std::string fallback) const {
    auto v = get(key);
    return v ? *v : std::move(fallback);
  }

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }
  bool empty() const { return entries_.empty(); }

  friend bool operator==(const Metadata&, const Metadata&) = default;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

enum class ScriptErrorKind {
  kEmpty,
  kHeader,
  kFieldCount,
  kNonNumeric,
  kNonMonotonicTime,
  kTimeResolution,
  kVisionDelayRange,
  kActionDelayRange,
  kVisionRateRange,
  kActionRateRange,
  kBumpRange,
  kTrailRange,
};

inline const char* to_string(ScriptErrorKind k) {
  switch (k) {
    case ScriptErrorKind::kEmpty: return "empty-schedule";
    case ScriptErrorKind::kHeader: return "bad-header";
    case ScriptErrorKind::kFieldCount: return "field-count";
    case ScriptErrorKind::kNonNumeric: return "non-numeric";
    case ScriptErrorKind::kNonMonotonicTime: return "non-monotonic-time";
    case ScriptErrorKind::kTimeResolution: return "time-resolution";
    case ScriptErrorKind::kVisionDelayRange: return "vision-delay-range";
    case ScriptErrorKind::kActionDelayRange: return "action-delay-range";
    case ScriptErrorKind::kVisionRateRange: return "vision-rate-range";
    case ScriptErrorKind::kActionRateRange: return "action-rate-range";
    case ScriptErrorKind::kBumpRange: return "bump-range";
    case ScriptErrorKind::kTrailRange: return "trail-range";
  }
  return "unknown";
}

class ScriptError : public std::runtime_error {
 public:
  ScriptError(ScriptErrorKind kind, std::size_t line, const std::string& what)
      : std::runtime_error(make_message(kind, line, what)), kind_(kind), line_(line) {}

  ScriptErrorKind kind() const { return kind_; }
  /// 1-based line number, 0 when not tied to a line.
  std::size_t line() const { return line_; }

 private:
  static std::string make_message(ScriptErrorKind kind, std::size_t line,
                                  const std::string& what) {
    std::string m = std::string("script error [") + to_string(kind) + "]";
    if (line > 0) m += " at line " + std::to_string(line);
    return m + ": " + what;
  }

  ScriptErrorKind kind_;
  std::size_t line_;
};

inline constexpr double kMaxBump = 100.0;

/// Time-ordered experiment parameters with previous-row hold between stamps.
class ParameterSchedule {
 public:
  ParameterSchedule() = default;
  ParameterSchedule(Metadata meta, std::vector<ScheduleRow> rows)
      : meta_(std::move(meta)), rows_(std::move(rows)) {
    validate();
    index_ticks();
  }

  const Metadata& metadata() const { return meta_; }
  Metadata& metadata() { return meta_; }
  const std::vector<ScheduleRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

  UnitMode mode() const {
    return meta_.get_or("mode", "game") == "model" ? UnitMode::kModel : UnitMode::kGame;
  }

  /// One past the tick of the last row.
  std::int64_t end_tick() const {
    return rows_.empty() ? 0 : seconds_to_ticks(rows_.back().time) + 1;
  }

  /// Row in force at tick t; before the first stamp the first row applies.
  const ScheduleRow& sample(std::int64_t t) const {
    if (rows_.empty()) throw std::logic_error("sample on empty schedule");
    auto it = std::upper_bound(ticks_.begin(), ticks_.end(), t);
    if (it == ticks_.begin()) return rows_.front();
    return rows_[static_cast<std::size_t>(it - ticks_.begin() - 1)];
  }

  friend bool operator==(const ParameterSchedule& a, const ParameterSchedule& b) {
    return a.meta_ == b.meta_ && a.rows_ == b.rows_;
  }

  /// Throws ScriptError on the first violated row invariant.
  void validate() const;

 private:
  Metadata meta_;
  std::vector<ScheduleRow> rows_;
  std::vector<std::int64_t> ticks_;

  friend ParameterSchedule parse_script(std::string_view text);
  void index_ticks() {
    ticks_.clear();
    ticks_.reserve(rows_.size());
    for (const auto& r : rows_) ticks_.push_back(seconds_to_ticks(r.time));
  }
};

namespace detail {

inline void check_row(const ScheduleRow& row, UnitMode mode, std::size_t line) {
  const double ticks = row.time / kTickSeconds;
  if (row.time < 0.0 || std::abs(ticks - std::round(ticks)) > 1e-6) {
    throw ScriptError(ScriptErrorKind::kTimeResolution, line,
                      "time " + format_exact(row.time) + " is not a non-negative multiple of 0.01 s");
  }
  if (!(row.delay_vis >= -1.0 && row.delay_vis < 1.0)) {
    throw ScriptError(ScriptErrorKind::kVisionDelayRange, line,
                      "T_vis must satisfy -1 <= T_vis < 1");
  }
  if (!(row.delay_act >= 0.0)) {
    throw ScriptError(ScriptErrorKind::kActionDelayRange, line, "T_act must be >= 0");
  }
  if (row.rate_vis < kMinRateBits || row.rate_vis > kMaxRateBits) {
    throw ScriptError(ScriptErrorKind::kVisionRateRange, line,
                      "R_vis must be an integer in [1, 10]");
  }
  if (row.rate_act < kMinRateBits || row.rate_act > kMaxRateBits) {
    throw ScriptError(ScriptErrorKind::kActionRateRange, line,
                      "R_act must be an integer in [1, 10]");
  }
  if (!(std::abs(row.bump) <= kMaxBump)) {
    throw ScriptError(ScriptErrorKind::kBumpRange, line, "|w| must be <= 100");
  }
  const bool trail_ok = mode == UnitMode::kModel ? std::abs(row.trail) <= 1.0
                                                 : (row.trail >= 0.0 && row.trail <= 1.0);
  if (!trail_ok) {
    throw ScriptError(ScriptErrorKind::kTrailRange, line,
                      mode == UnitMode::kModel ? "model-mode |r| must be <= 1"
                                               : "trail position must be in [0, 1]");
  }
}

}  // namespace detail

inline void ParameterSchedule::validate() const {
  if (rows_.empty()) throw ScriptError(ScriptErrorKind::kEmpty, 0, "no data rows");
  const UnitMode m = mode();
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    detail::check_row(rows_[i], m, 0);
    if (i > 0 && !(seconds_to_ticks(rows_[i].time) > seconds_to_ticks(rows_[i - 1].time))) {
      throw ScriptError(ScriptErrorKind::kNonMonotonicTime, 0,
                        "time " + format_exact(rows_[i].time) + " does not increase");
    }
  }
}

// ---------------------------------------------------------------------------
// Text format
//
//   # game=2 seed=7 prng=mt19937_64
//   time,r,w,R_act,T_act,T_vis,R_vis
//
// The column line above is documentation only; data lines carry exactly seven
// comma-separated numbers in that order.

inline constexpr int kScriptFields = 7;

namespace detail {

inline Metadata parse_header(std::string_view line, std::size_t lineno) {
  Metadata meta;
  line.remove_prefix(1);
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ScriptError(ScriptErrorKind::kHeader, lineno,
                        "header token '" + tok + "' is not key=value");
    }
    meta.set(tok.substr(0, eq), tok.substr(eq + 1));
  }
  return meta;
}

inline int parse_rate(double v, ScriptErrorKind kind, std::size_t line) {
  if (v != std::floor(v) || v < kMinRateBits || v > kMaxRateBits) {
    throw ScriptError(kind, line, "rate " + format_exact(v) + " is not an integer in [1, 10]");
  }
  return static_cast<int>(v);
}

}  // namespace detail

inline ParameterSchedule parse_script(std::string_view text) {
  Metadata meta;
  std::vector<ScheduleRow> rows;
  bool seen_header = false;
  std::size_t lineno = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    if (line.front() == '#') {
      if (seen_header || !rows.empty()) {
        throw ScriptError(ScriptErrorKind::kHeader, lineno,
                          "only one '#' header line is allowed, before the data");
      }
      seen_header = true;
      meta = detail::parse_header(line, lineno);
      continue;
    }

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
      auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string_view::npos
                                              ? std::string_view::npos
                                              : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != kScriptFields) {
      throw ScriptError(ScriptErrorKind::kFieldCount, lineno,
                        "expected 7 fields (time,r,w,R_act,T_act,T_vis,R_vis), got " +
                            std::to_string(fields.size()));
    }
    double v[kScriptFields];
    for (int i = 0; i < kScriptFields; ++i) {
      auto parsed = parse_number(fields[static_cast<std::size_t>(i)]);
      if (!parsed) {
        throw ScriptError(ScriptErrorKind::kNonNumeric, lineno,
                          "field " + std::to_string(i + 1) + " '" +
                              std::string(fields[static_cast<std::size_t>(i)]) +
                              "' is not a number");
      }
      v[i] = *parsed;
    }

    ScheduleRow row;
    row.time = v[0];
    row.trail = canonical(v[1]);
    row.bump = canonical(v[2]);
    row.rate_act = detail::parse_rate(v[3], ScriptErrorKind::kActionRateRange, lineno);
    row.delay_act = canonical(v[4]);
    row.delay_vis = canonical(v[5]);
    row.rate_vis = detail::parse_rate(v[6], ScriptErrorKind::kVisionRateRange, lineno);
    const UnitMode mode =
        meta.get_or("mode", "game") == "model" ? UnitMode::kModel : UnitMode::kGame;
    detail::check_row(row, mode, lineno);
    if (!rows.empty() &&
        !(seconds_to_ticks(row.time) > seconds_to_ticks(rows.back().time))) {
      throw ScriptError(ScriptErrorKind::kNonMonotonicTime, lineno,
                        "time " + format_exact(row.time) + " does not increase");
    }
    row.time = ticks_to_seconds(seconds_to_ticks(row.time));
    rows.push_back(row);
  }
  if (rows.empty()) throw ScriptError(ScriptErrorKind::kEmpty, 0, "no data rows");
  ParameterSchedule out;
  out.meta_ = std::move(meta);
  out.rows_ = std::move(rows);
  out.index_ticks();
  return out;
}

inline std::string write_script(const ParameterSchedule& sched) {
  std::string out;
  out.reserve(sched.rows().size() * 32 + 128);
  if (!sched.metadata().empty()) {
    out += '#';
    for (const auto& [k, v] : sched.metadata().entries()) {
      out += ' ';
      out += k;
      out += '=';
      out += v;
    }
    out += '\n';
  }
  for (const auto& r : sched.rows()) {
    out += format_exact(r.time);
    out += ',';
    out += format_number(r.trail);
    out += ',';
    out += format_number(r.bump);
    out += ',';
    out += std::to_string(r.rate_act);
    out += ',';
    out += format_number(r.delay_act);
    out += ',';
    out += format_number(r.delay_vis);
    out += ',';
    out += std::to_string(r.rate_vis);
    out += '\n';
  }
  return out;
}

/// FNV-1a over the canonical text.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t schedule_hash(const ParameterSchedule& s) {
  return fnv1a(write_script(s));
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  static constexpr char digits[] = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[v & 0xF];
    v >>= 4;
  }
  return std::string(buf, 16);
}

// ---------------------------------------------------------------------------
// Labeled blocks ("blocks=start/end/label;...") for schedules whose analysis
// windows are not marked by parameter changes (the disturbance game).

struct BlockSpan {
  double start = 0.0;
  double end = 0.0;
  std::string label;
};

inline std::string encode_blocks(const std::vector<BlockSpan>& blocks) {
  std::string out;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (i) out += ';';
    out += format_exact(blocks[i].start) + "/" + format_exact(blocks[i].end) + "/" +
           blocks[i].label;
  }
  return out;
}

inline std::vector<BlockSpan> decode_blocks(std::string_view s) {
  std::vector<BlockSpan> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto semi = s.find(';', pos);
    if (semi == std::string_view::npos) semi = s.size();
    auto item = s.substr(pos, semi - pos);
    pos = semi + 1;
    auto a = item.find('/');
    auto b = a == std::string_view::npos ? a : item.find('/', a + 1);
    if (b == std::string_view::npos) throw std::invalid_argument("malformed blocks entry");
    auto start = parse_number(item.substr(0, a));
    auto end = parse_number(item.substr(a + 1, b - a - 1));
    if (!start || !end) throw std::invalid_argument("malformed blocks entry");
    out.push_back({*start, *end, std::string(item.substr(b + 1))});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Game builders

enum class GameId { kGame1 = 1, kGame2, kGame3, kGame4, kGame5, kFitts };

inline GameId parse_game_id(std::string_view s) {
  if (s == "1") return GameId::kGame1;
  if (s == "2") return GameId::kGame2;
  if (s == "3") return GameId::kGame3;
  if (s == "4") return GameId::kGame4;
  if (s == "5") return GameId::kGame5;
  if (s == "fitts") return GameId::kFitts;
  throw std::invalid_argument("unknown game id '" + std::string(s) + "'");
}

inline std::string to_string(GameId id) {
  return id == GameId::kFitts ? "fitts" : std::to_string(static_cast<int>(id));
}

struct GameOptions {
  TrailOptions trail;
  double bump_amplitude = 100.0;
  bool alternate_bumps = false;
  double block_seconds = 30.0;
  /// Warning used by the games that do not sweep T_vis.
  double default_vision_delay = -1.0;
  /// Games 2-4 replay one trail segment in every block so the swept
  /// parameter is the only difference between blocks.
  bool repeat_block_trail = true;
  std::vector<double> fitts_widths{0.05, 0.1};
  std::vector<double> fitts_distances{0.2, 0.4};
  double fitts_duration = 120.0;
};

/// Look-ahead sequence of the vision-delay game in the "positive = delay"
/// convention: 1 s, 0.75 s, 0.5 s of warning, then 0.1 s steps to 0.5 s delay.
inline std::vector<double> game1_vision_delays() {
  std::vector<double> out{-1.0, -0.75, -0.5};
  for (int k = -4; k <= 5; ++k) out.push_back(k / 10.0);
  return out;
}

inline std::vector<double> game2_action_delays() {
  return {0.0, 0.15, 0.30, 0.45, 0.60, 0.75};
}

namespace detail {

inline ScheduleRow base_row(std::int64_t tick, const GameOptions& opt) {
  ScheduleRow r;
  r.time = ticks_to_seconds(tick);
  r.trail = 0.5;
  r.bump = 0.0;
  r.rate_act = kMaxRateBits;
  r.delay_act = 0.0;
  r.delay_vis = opt.default_vision_delay;
  r.rate_vis = kMaxRateBits;
  return r;
}

inline Metadata game_metadata(GameId id, std::uint64_t seed) {
  Metadata m;
  m.set("game", to_string(id));
  m.set("seed", std::to_string(seed));
  m.set("prng", std::string(kPrngId));
  m.set("mode", "game");
  return m;
}

/// Swept-parameter game: one block per value, `apply` sets the parameter.
template <typename Apply>
ParameterSchedule build_sweep(GameId id, std::uint64_t seed, const GameOptions& opt,
                              std::size_t blocks, bool repeat_trail, Apply apply) {
  const std::int64_t block_ticks = seconds_to_ticks(opt.block_seconds);
  const std::int64_t total = block_ticks * static_cast<std::int64_t>(blocks);
  const Track trail = repeat_trail ? gen_trail(opt.block_seconds, seed, opt.trail)
                                   : gen_trail(ticks_to_seconds(total), seed, opt.trail);
  std::vector<ScheduleRow> rows;
  rows.reserve(static_cast<std::size_t>(total));
  for (std::int64_t t = 0; t < total; ++t) {
    ScheduleRow row = base_row(t, opt);
    const std::int64_t k = repeat_trail ? t % block_ticks : t;
    row.trail = canonical(trail[static_cast<std::size_t>(k)]);
    apply(row, static_cast<std::size_t>(t / block_ticks));
    rows.push_back(row);
  }
  return ParameterSchedule(game_metadata(id, seed), std::move(rows));
}

inline std::string join_numbers(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += '|';
    out += format_number(v[i]);
  }
  return out;
}

}  // namespace detail

inline std::vector<double> split_numbers(std::string_view s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto bar = s.find('|', pos);
    if (bar == std::string_view::npos) bar = s.size();
    auto v = parse_number(s.substr(pos, bar - pos));
    if (!v) throw std::invalid_argument("malformed number list '" + std::string(s) + "'");
    out.push_back(*v);
    pos = bar + 1;
  }
  return out;
}

inline constexpr double kRestSeconds = 5.0;
inline constexpr double kScenarioSeconds = 60.0;

inline ParameterSchedule build_game(GameId id, std::uint64_t seed,
                                    const GameOptions& opt = {}) {
  switch (id) {
    case GameId::kGame1: {
      const auto delays = game1_vision_delays();
      return detail::build_sweep(id, seed, opt, delays.size(), false,
                                 [&](ScheduleRow& r, std::size_t b) {
                                   r.delay_vis = delays[b];
                                 });
    }
    case GameId::kGame2: {
      const auto delays = game2_action_delays();
      return detail::build_sweep(id, seed, opt, delays.size(), opt.repeat_block_trail,
                                 [&](ScheduleRow& r, std::size_t b) {
                                   r.delay_act = delays[b];
                                 });
    }
    case GameId::kGame3:
      return detail::build_sweep(id, seed, opt, 7, opt.repeat_block_trail,
                                 [](ScheduleRow& r, std::size_t b) {
                                   r.rate_vis = static_cast<int>(b) + 1;
                                 });
    case GameId::kGame4:
      return detail::build_sweep(id, seed, opt, 7, opt.repeat_block_trail,
                                 [](ScheduleRow& r, std::size_t b) {
                                   r.rate_act = static_cast<int>(b) + 1;
                                 });
    case GameId::kGame5: {
      const std::int64_t rest = seconds_to_ticks(kRestSeconds);
      const std::int64_t scen = seconds_to_ticks(kScenarioSeconds);
      const Track bumps = gen_bumps(kScenarioSeconds, seed,
                                    {opt.bump_amplitude, 0.1, opt.alternate_bumps});
      const Track trail = gen_trail(kScenarioSeconds, seed, opt.trail);
      std::vector<ScheduleRow> rows;
      rows.reserve(static_cast<std::size_t>(3 * (rest + scen)));
      std::vector<BlockSpan> blocks;
      const char* labels[3] = {"bumps", "trail", "trail_bumps"};
      std::int64_t t = 0;
      for (int s = 0; s < 3; ++s) {
        for (std::int64_t i = 0; i < rest; ++i, ++t) rows.push_back(detail::base_row(t, opt));
        blocks.push_back({ticks_to_seconds(t), ticks_to_seconds(t + scen), labels[s]});
        for (std::int64_t i = 0; i < scen; ++i, ++t) {
          ScheduleRow row = detail::base_row(t, opt);
          if (s != 1) row.bump = canonical(bumps[static_cast<std::size_t>(i)]);
          if (s != 0) row.trail = canonical(trail[static_cast<std::size_t>(i)]);
          rows.push_back(row);
        }
      }
      Metadata m = detail::game_metadata(id, seed);
      m.set("blocks", encode_blocks(blocks));
      return ParameterSchedule(std::move(m), std::move(rows));
    }
    case GameId::kFitts: {
      const FittsSchedule fitts =
          gen_fitts(opt.fitts_duration, seed, opt.fitts_widths, opt.fitts_distances);
      const std::int64_t total = duration_ticks(opt.fitts_duration);
      std::vector<ScheduleRow> rows;
      rows.reserve(static_cast<std::size_t>(total));
      for (std::int64_t t = 0; t < total; ++t) {
        ScheduleRow row = detail::base_row(t, opt);
        row.delay_vis = 0.0;
        row.trail = canonical(fitts.zone_at(ticks_to_seconds(t)).center);
        rows.push_back(row);
      }
      Metadata m = detail::game_metadata(id, seed);
      m.set("fitts_duration", format_number(opt.fitts_duration));
      m.set("fitts_widths", detail::join_numbers(opt.fitts_widths));
      m.set("fitts_distances", detail::join_numbers(opt.fitts_distances));
      return ParameterSchedule(std::move(m), std::move(rows));
    }
  }
  throw std::invalid_argument("unknown game id");
}

/// Regenerates the zone schedule of a Fitts script from its header.
inline std::optional<FittsSchedule> fitts_from_schedule(const ParameterSchedule& s) {
  if (s.metadata().get_or("game", "") != "fitts") return std::nullopt;
  const auto seed = std::stoull(s.metadata().get_or("seed", "0"));
  const auto duration = parse_number(s.metadata().get_or("fitts_duration", ""));
  if (!duration) throw std::invalid_argument("fitts script lacks fitts_duration");
  return gen_fitts(*duration, seed, split_numbers(s.metadata().get_or("fitts_widths", "")),
                   split_numbers(s.metadata().get_or("fitts_distances", "")));
}

/// Rows [from, to) seconds of a schedule, re-timed to start at zero.
inline ParameterSchedule slice_schedule(const ParameterSchedule& s, double from, double to) {
  const std::int64_t a = seconds_to_ticks(from);
  const std::int64_t b = seconds_to_ticks(to);
  std::vector<ScheduleRow> rows;
  for (std::int64_t t = a; t < b; ++t) {
    ScheduleRow row = s.sample(t);
    row.time = ticks_to_seconds(t - a);
    rows.push_back(row);
  }
  Metadata m = s.metadata();
  m.set("slice", format_exact(from) + "/" + format_exact(to));
  if (m.get("blocks")) {
    std::vector<BlockSpan> kept;
    for (auto blk : decode_blocks(*m.get("blocks"))) {
      blk.start = std::max(blk.start, from) - from;
      blk.end = std::min(blk.end, to) - from;
      if (blk.end > blk.start) kept.push_back(blk);
    }
    m.set("blocks", encode_blocks(kept));
  }
  return ParameterSchedule(std::move(m), std::move(rows));
}

}  // namespace wheelcon
