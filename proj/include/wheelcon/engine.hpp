#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wheelcon/disturbance.hpp"
#include "wheelcon/plant.hpp"
#include "wheelcon/script.hpp"
#include "wheelcon/signal.hpp"

namespace wheelcon {

/// Screen width in 100-pixel units for a 1920 px display.
inline constexpr double kDefaultScreenScale = 19.2;
inline constexpr double kDefaultSensitivity = 4e-5;
inline constexpr double kDefaultMaxAngle = 90.0;

struct SessionConfig {
  ParameterSchedule schedule;
  UnitMode mode = UnitMode::kGame;
  /// Screen widths (model units in model mode) per tick per degree.
  double sensitivity = kDefaultSensitivity;
  double max_angle = kDefaultMaxAngle;
  /// Position increment per tick per unit of bump force.
  double bump_gain = 0.45 * kDefaultSensitivity;
  double lookbehind = 2.0;
  /// Multiplier from internal position units to logged x.
  double screen_scale = kDefaultScreenScale;
  bool quantize_vision = true;
  bool quantize_action = true;

  double max_speed() const { return sensitivity * max_angle; }

  /// Defaults for the schedule's unit mode. Model mode is the ideal
  /// unit-gain channel: one model unit per "degree", no quantizers.
  static SessionConfig for_schedule(ParameterSchedule schedule) {
    SessionConfig c;
    c.mode = schedule.mode();
    c.schedule = std::move(schedule);
    if (c.mode == UnitMode::kModel) {
      c.sensitivity = 1.0;
      c.max_angle = 1.0e6;
      c.bump_gain = 1.0;
      c.screen_scale = 1.0;
      c.quantize_vision = false;
      c.quantize_action = false;
    }
    return c;
  }

  void check() const {
    if (!(sensitivity > 0.0)) throw std::invalid_argument("sensitivity must be > 0");
    if (!(max_angle > 0.0)) throw std::invalid_argument("max_angle must be > 0");
    if (!(bump_gain >= 0.0)) throw std::invalid_argument("bump_gain must be >= 0");
    if (!(lookbehind >= 0.0)) throw std::invalid_argument("lookbehind must be >= 0");
    if (!(screen_scale > 0.0)) throw std::invalid_argument("screen_scale must be > 0");
    if (schedule.empty()) throw std::invalid_argument("empty schedule");
  }

  /// Canonical description of every field that influences the records.
  std::string canonical_text() const {
    std::string s;
    s += "mode=" + std::string(mode == UnitMode::kModel ? "model" : "game");
    s += ";k=" + format_exact(sensitivity);
    s += ";max_angle=" + format_exact(max_angle);
    s += ";g_w=" + format_exact(bump_gain);
    s += ";lookbehind=" + format_exact(lookbehind);
    s += ";scale=" + format_exact(screen_scale);
    s += ";qv=" + std::string(quantize_vision ? "1" : "0");
    s += ";qa=" + std::string(quantize_action ? "1" : "0");
    s += ";schedule=" + hex64(schedule_hash(schedule));
    return s;
  }

  std::uint64_t hash() const { return fnv1a(canonical_text()); }
};

/// What the subject sees at one tick.
struct Frame {
  std::int64_t seq = 0;
  double t = 0.0;
  /// Player position in internal units (normalized screen width in game mode).
  double player = 0.0;
  /// Visible trail, already passed through the vision quantizer.
  std::vector<TrailSample> trail_window;
  ScheduleRow block;
  std::optional<FittsZone> fitts_zone;

  /// Newest visible trail sample at or before `tick`, if any.
  const TrailSample* sample_at_or_before(std::int64_t tick) const {
    const TrailSample* best = nullptr;
    for (const auto& s : trail_window) {
      if (s.tick <= tick) best = &s;
    }
    return best;
  }
  const TrailSample* sample_at(std::int64_t tick) const {
    for (const auto& s : trail_window) {
      if (s.tick == tick) return &s;
    }
    return nullptr;
  }
};

struct LogRecord {
  double t = 0.0;
  double x = 0.0;
  double u = 0.0;

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

struct SessionDiagnostics {
  std::int64_t vision_clamped = 0;
  std::int64_t angle_clamped = 0;
  std::int64_t late_input = 0;
};

struct SessionLog {
  Metadata header;
  std::vector<LogRecord> records;
  /// Wheel angle fed to the engine at each tick.
  std::vector<double> input_trace;

  bool aborted() const { return header.get_or("status", "complete") != "complete"; }
};

class HashMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Session {
 public:
  explicit Session(SessionConfig config) : cfg_(std::move(config)) {
    cfg_.check();
    end_ = cfg_.schedule.end_tick();
    fitts_ = fitts_from_schedule(cfg_.schedule);
    build_trail();
    player_ = trail_[0];
  }

  const SessionConfig& config() const { return cfg_; }
  std::int64_t now() const { return state_.t; }
  std::int64_t end_tick() const { return end_; }
  bool done() const { return state_.t >= end_; }
  double x() const { return state_.x; }
  double player() const { return player_; }
  const SessionDiagnostics& diagnostics() const { return diag_; }
  SessionDiagnostics& diagnostics() { return diag_; }
  const std::vector<double>& trail_positions() const { return trail_; }

  /// Frame shown at the present tick.
  Frame frame() {
    const std::int64_t t = state_.t;
    const ScheduleRow& row = cfg_.schedule.sample(std::min(t, end_ - 1));
    Frame f;
    f.seq = t;
    f.t = ticks_to_seconds(t);
    f.player = player_;
    f.block = row;
    f.trail_window = visible_segment(trail_, t, {row.delay_vis, cfg_.lookbehind});
    if (cfg_.quantize_vision) {
      for (auto& s : f.trail_window) {
        if (s.pos < 0.0 || s.pos > 1.0) ++diag_.vision_clamped;
        s.pos = quantize_vision(s.pos, row.rate_vis);
      }
    }
    if (fitts_) f.fitts_zone = fitts_->zone_at(f.t);
    return f;
  }

  /// Advances one tick with the given wheel angle and returns the record of
  /// the tick just executed: x before the step and the delayed command u.
  LogRecord tick(double wheel_angle) {
    if (done()) throw std::logic_error("session complete");
    if (!std::isfinite(wheel_angle)) throw std::invalid_argument("non-finite wheel angle");
    const std::int64_t t = state_.t;
    const ScheduleRow& row = cfg_.schedule.sample(t);

    if (std::abs(wheel_angle) > cfg_.max_angle) ++diag_.angle_clamped;
    const double angle = std::clamp(wheel_angle, -cfg_.max_angle, cfg_.max_angle);
    const double speed = cfg_.quantize_action
                             ? quantize_action(angle, row.rate_act, cfg_.max_angle,
                                               cfg_.max_speed())
                             : angle * cfg_.sensitivity;
    const std::int64_t delay = seconds_to_ticks(row.delay_act);
    if (delay != action_delay_.delay_ticks()) action_delay_.resize(delay);
    const double u = action_delay_.push(speed);

    const double r = increments_[static_cast<std::size_t>(t)];
    const double w = row.bump * cfg_.bump_gain;

    LogRecord rec{ticks_to_seconds(t), state_.x * cfg_.screen_scale, u / cfg_.sensitivity};
    state_ = step_plant(state_, {u, r, w});
    player_ += u + w;
    return rec;
  }

 private:
  /// Trail position per tick (one extra sample past the end) and the plant
  /// disturbance r(t) = p(t) - p(t+1). Game mode reads positions from the
  /// schedule; model mode reads r(t) and integrates the positions, keeping
  /// r(t) bit-exact.
  void build_trail() {
    const auto n = static_cast<std::size_t>(end_);
    trail_.assign(n + 1, 0.0);
    increments_.assign(n, 0.0);
    if (cfg_.mode == UnitMode::kModel) {
      for (std::size_t t = 0; t < n; ++t) {
        increments_[t] = cfg_.schedule.sample(static_cast<std::int64_t>(t)).trail;
        trail_[t + 1] = trail_[t] - increments_[t];
      }
    } else {
      for (std::size_t t = 0; t < n; ++t) {
        trail_[t] = cfg_.schedule.sample(static_cast<std::int64_t>(t)).trail;
      }
      trail_[n] = trail_[n - 1];
      for (std::size_t t = 0; t < n; ++t) increments_[t] = trail_[t] - trail_[t + 1];
    }
  }

  SessionConfig cfg_;
  std::int64_t end_ = 0;
  std::optional<FittsSchedule> fitts_;
  std::vector<double> trail_;
  std::vector<double> increments_;
  PlantState state_{};
  double player_ = 0.0;
  DelayLine action_delay_;
  SessionDiagnostics diag_;
};

/// Anything that turns frames into wheel angles.
class Subject {
 public:
  virtual ~Subject() = default;
  virtual double act(const Frame& frame) = 0;
  virtual std::string describe() const = 0;
};

inline Metadata log_header(const SessionConfig& cfg, const std::string& subject) {
  Metadata h;
  h.set("config_hash", hex64(cfg.hash()));
  h.set("schedule_hash", hex64(schedule_hash(cfg.schedule)));
  h.set("seed", cfg.schedule.metadata().get_or("seed", "0"));
  h.set("prng", cfg.schedule.metadata().get_or("prng", std::string(kPrngId)));
  h.set("game", cfg.schedule.metadata().get_or("game", "custom"));
  h.set("mode", cfg.mode == UnitMode::kModel ? "model" : "game");
  h.set("sensitivity", format_exact(cfg.sensitivity));
  h.set("max_angle", format_exact(cfg.max_angle));
  h.set("bump_gain", format_exact(cfg.bump_gain));
  h.set("lookbehind", format_exact(cfg.lookbehind));
  h.set("screen_scale", format_exact(cfg.screen_scale));
  h.set("quantize_vision", cfg.quantize_vision ? "1" : "0");
  h.set("quantize_action", cfg.quantize_action ? "1" : "0");
  h.set("subject", subject);
  h.set("status", "complete");
  return h;
}

/// Runs every tick without pacing. A throwing subject ends the run; the log
/// keeps the ticks executed so far and is marked aborted.
inline SessionLog run_headless(const SessionConfig& config, Subject& subject) {
  Session session(config);
  SessionLog log;
  log.header = log_header(config, subject.describe());
  log.records.reserve(static_cast<std::size_t>(session.end_tick()));
  log.input_trace.reserve(static_cast<std::size_t>(session.end_tick()));
  while (!session.done()) {
    double angle = 0.0;
    try {
      angle = subject.act(session.frame());
    } catch (const std::exception& e) {
      log.header.set("status", "aborted");
      std::string msg = e.what();
      std::replace(msg.begin(), msg.end(), ' ', '_');
      log.header.set("abort_reason", msg);
      break;
    }
    log.input_trace.push_back(angle);
    log.records.push_back(session.tick(angle));
  }
  return log;
}

/// Feeds a recorded angle trace back through the engine.
class TraceSubject final : public Subject {
 public:
  explicit TraceSubject(std::vector<double> trace) : trace_(std::move(trace)) {}
  double act(const Frame& frame) override {
    const auto i = static_cast<std::size_t>(frame.seq);
    if (i >= trace_.size()) throw std::out_of_range("input trace exhausted");
    return trace_[i];
  }
  std::string describe() const override { return "external"; }

 private:
  std::vector<double> trace_;
};

/// Re-runs a log's input trace. The config must hash to the values recorded
/// in the log header.
inline SessionLog replay(const SessionLog& log, const SessionConfig& config) {
  if (log.header.get_or("schedule_hash", "") != hex64(schedule_hash(config.schedule))) {
    throw HashMismatch("replay: schedule hash does not match the log");
  }
  if (log.header.get_or("config_hash", "") != hex64(config.hash())) {
    throw HashMismatch("replay: config hash does not match the log");
  }
  Session session(config);
  SessionLog out;
  out.header = log.header;
  out.input_trace = log.input_trace;
  for (double angle : log.input_trace) {
    if (session.done()) break;
    (void)session.frame();
    out.records.push_back(session.tick(angle));
  }
  return out;
}

}  // namespace wheelcon
