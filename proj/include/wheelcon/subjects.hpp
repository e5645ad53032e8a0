#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wheelcon/engine.hpp"
#include "wheelcon/prng.hpp"
#include "wheelcon/signal.hpp"

namespace wheelcon {

class SubjectError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Policies as plain functions

/// Picks the level that minimises the predicted next error |x + sum(pending)
/// + s|. Ties go to the smaller |s|, then to the negative level.
inline double quantized_greedy(double x, std::span<const double> pending,
                               std::span<const double> levels) {
  if (levels.empty()) throw std::invalid_argument("quantized_greedy: empty level set");
  const double predicted = std::accumulate(pending.begin(), pending.end(), x);
  double best = levels.front();
  double best_cost = std::numeric_limits<double>::infinity();
  for (double s : levels) {
    const double cost = std::abs(predicted + s);
    const bool better =
        cost < best_cost ||
        (cost == best_cost &&
         (std::abs(s) < std::abs(best) || (std::abs(s) == std::abs(best) && s < best)));
    if (better) {
      best = s;
      best_cost = cost;
    }
  }
  return best;
}

/// u(t) = -r(t - T), zero before the first T ticks.
inline double delayed_inverter(std::span<const double> r_history, std::int64_t t,
                               std::int64_t delay_ticks) {
  if (delay_ticks < 0) throw std::invalid_argument("delayed_inverter: negative delay");
  const std::int64_t s = t - delay_ticks;
  if (s < 0) return 0.0;
  if (s >= static_cast<std::int64_t>(r_history.size())) {
    throw SubjectError("delayed_inverter: r(t - T) not yet observed");
  }
  return -r_history[static_cast<std::size_t>(s)];
}

// ---------------------------------------------------------------------------
// Engine-driven subjects

/// What a synthetic subject knows about the wheel.
struct SubjectContext {
  double sensitivity = kDefaultSensitivity;
  double max_angle = kDefaultMaxAngle;
  UnitMode mode = UnitMode::kGame;
  bool quantize_action = true;

  static SubjectContext from(const SessionConfig& c) {
    return {c.sensitivity, c.max_angle, c.mode, c.quantize_action};
  }
  double max_speed() const { return sensitivity * max_angle; }
};

/// Cancels the trail increment observed T ticks ago. Needs the window to
/// reach one tick past t - T, i.e. vision delay <= T - 1 ticks.
class DelayedInverterSubject final : public Subject {
 public:
  DelayedInverterSubject(std::int64_t delay_ticks, SubjectContext ctx)
      : delay_(delay_ticks), ctx_(ctx) {
    if (delay_ticks < 0) throw std::invalid_argument("delayed-inverter: negative T");
  }

  double act(const Frame& f) override {
    const std::int64_t s = f.seq - delay_;
    if (s < 0) return 0.0;
    const TrailSample* a = f.sample_at(s);
    const TrailSample* b = f.sample_at(s + 1);
    if (a == nullptr || b == nullptr) {
      throw SubjectError("delayed-inverter: insufficient warning to observe r(t - T)");
    }
    const double r = a->pos - b->pos;
    return -r / ctx_.sensitivity;
  }

  std::string describe() const override {
    return "delayed-inverter:T=" + format_exact(ticks_to_seconds(delay_));
  }

  std::int64_t delay_ticks() const { return delay_; }

 private:
  std::int64_t delay_;
  SubjectContext ctx_;
};

/// Rejects schedules where the inverter could not see r(t - T).
inline void check_inverter_warning(const ParameterSchedule& sched, std::int64_t delay_ticks,
                                   double lookbehind) {
  if (seconds_to_ticks(lookbehind) < delay_ticks) {
    throw SubjectError("delayed-inverter: lookbehind shorter than T");
  }
  for (const auto& row : sched.rows()) {
    if (seconds_to_ticks(row.delay_vis) > delay_ticks - 1) {
      throw SubjectError("delayed-inverter: insufficient warning (T_vis = " +
                         format_exact(row.delay_vis) + " s at t = " +
                         format_exact(row.time) + ")");
    }
  }
}

/// One-step greedy controller over a finite level set. With bits == 0 the
/// level set follows the engine's action quantizer for the active block.
class QuantizedGreedySubject final : public Subject {
 public:
  QuantizedGreedySubject(int bits, double scale, SubjectContext ctx)
      : bits_(bits), scale_(scale), ctx_(ctx) {
    if (bits != 0) check_rate_bits(bits);
    if (bits != 0 && !(scale > 0.0)) throw std::invalid_argument("quantized-greedy: scale must be > 0");
  }

  double act(const Frame& f) override {
    const TrailSample* now = f.sample_at_or_before(f.seq);
    if (now == nullptr) throw SubjectError("quantized-greedy: no visible trail");
    const double x = f.player - now->pos;
    const auto pending_n = static_cast<std::size_t>(seconds_to_ticks(f.block.delay_act));
    const std::size_t from = issued_.size() > pending_n ? issued_.size() - pending_n : 0;
    const std::span<const double> pending(issued_.data() + from, issued_.size() - from);
    const auto levels = bits_ == 0 ? action_levels(f.block.rate_act, ctx_.max_speed())
                                   : action_levels(bits_, scale_);
    const double s = quantized_greedy(x, pending, levels);
    issued_.push_back(s);
    return s / ctx_.sensitivity;
  }

  std::string describe() const override {
    if (bits_ == 0) return "quantized-greedy";
    return "quantized-greedy:R=" + std::to_string(bits_) + ",a=" + format_exact(scale_);
  }

 private:
  int bits_;
  double scale_;
  SubjectContext ctx_;
  std::vector<double> issued_;
};

struct NoisyHumanParams {
  /// Perception-to-action latency, seconds.
  double internal_delay = 0.2;
  /// Bits of the subject's own quantizer on perceived error; the step is
  /// 2^-rate screen widths.
  int internal_rate = 5;
  /// Standard deviation of additive angle noise, degrees.
  double motor_noise_sd = 1.0;
  /// Degrees of wheel per screen width of position error.
  double gain = 800.0;
  /// How far ahead the subject aims when the trail ahead is visible, seconds.
  double lead = 0.35;
  std::uint64_t seed = 0;
};

/// Proportional tracker of the trail point `lead` ahead, or of the newest
/// visible sample when the warning is shorter. Perceives its error through
/// its own quantizer and acts through its own delay line, with Gaussian
/// angle noise.
class NoisyHumanSubject final : public Subject {
 public:
  NoisyHumanSubject(NoisyHumanParams p, SubjectContext ctx)
      : p_(p),
        ctx_(ctx),
        delay_(seconds_to_ticks(p.internal_delay)),
        rng_(stream_seed(p.seed, Stream::kSubject)) {
    check_rate_bits(p.internal_rate);
    if (!(p.motor_noise_sd >= 0.0)) throw std::invalid_argument("noisy-human: sd must be >= 0");
    if (!(p.gain > 0.0)) throw std::invalid_argument("noisy-human: gain must be > 0");
    if (!(p.lead >= 0.0)) throw std::invalid_argument("noisy-human: lead must be >= 0");
  }

  double act(const Frame& f) override {
    double command = held_;
    if (!f.trail_window.empty()) {
      const std::int64_t target_tick =
          std::min(f.seq + seconds_to_ticks(p_.lead), f.trail_window.back().tick);
      const TrailSample* target = f.sample_at_or_before(target_tick);
      if (target != nullptr) {
        double err = target->pos - f.player;
        if (ctx_.mode == UnitMode::kGame) {
          // Mid-rise: the perceived error is never exactly zero.
          const double step = std::ldexp(1.0, -p_.internal_rate);
          err = (std::floor(err / step) + 0.5) * step;
        }
        command = p_.gain * err;
        held_ = command;
      }
    }
    const double delayed = delay_.push(command);
    return delayed + p_.motor_noise_sd * rng_.normal();
  }

  std::string describe() const override {
    return "noisy-human:sd=" + format_exact(p_.motor_noise_sd) +
           ",delay=" + format_exact(p_.internal_delay) +
           ",rate=" + std::to_string(p_.internal_rate) + ",gain=" + format_exact(p_.gain) +
           ",lead=" + format_exact(p_.lead) + ",seed=" + std::to_string(p_.seed);
  }

 private:
  NoisyHumanParams p_;
  SubjectContext ctx_;
  DelayLine delay_;
  Prng rng_;
  double held_ = 0.0;
};

/// Holds a constant angle.
class ConstantSubject final : public Subject {
 public:
  explicit ConstantSubject(double angle) : angle_(angle) {}
  double act(const Frame&) override { return angle_; }
  std::string describe() const override { return "constant:angle=" + format_exact(angle_); }

 private:
  double angle_;
};

// ---------------------------------------------------------------------------
// "kind:key=value,key=value" specs

struct SubjectSpec {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> params;

  std::optional<double> number(std::string_view key) const {
    for (const auto& [k, v] : params) {
      if (k == key) {
        auto n = parse_number(v);
        if (!n) throw std::invalid_argument("subject param '" + k + "' is not a number");
        return n;
      }
    }
    return std::nullopt;
  }
  double number_or(std::string_view key, double fallback) const {
    auto n = number(key);
    return n ? *n : fallback;
  }
};

inline SubjectSpec parse_subject_spec(std::string_view text) {
  SubjectSpec spec;
  const auto colon = text.find(':');
  spec.kind = std::string(text.substr(0, colon));
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      auto comma = rest.find(',');
      auto item = rest.substr(0, comma);
      auto eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        throw std::invalid_argument("subject param '" + std::string(item) + "' is not key=value");
      }
      spec.params.emplace_back(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  static constexpr std::string_view kinds[] = {"delayed-inverter", "quantized-greedy",
                                               "noisy-human", "constant", "external"};
  if (std::find(std::begin(kinds), std::end(kinds), spec.kind) == std::end(kinds)) {
    throw std::invalid_argument("unknown subject kind '" + spec.kind + "'");
  }
  return spec;
}

/// Builds a synthetic subject for a session. `external` subjects are driven
/// by a trace or a socket and cannot be built here.
inline std::unique_ptr<Subject> make_subject(const SubjectSpec& spec, const SessionConfig& cfg) {
  const SubjectContext ctx = SubjectContext::from(cfg);
  if (spec.kind == "delayed-inverter") {
    const std::int64_t t = seconds_to_ticks(spec.number_or("T", 0.0));
    check_inverter_warning(cfg.schedule, t, cfg.lookbehind);
    return std::make_unique<DelayedInverterSubject>(t, ctx);
  }
  if (spec.kind == "quantized-greedy") {
    const int bits = static_cast<int>(spec.number_or("R", 0.0));
    return std::make_unique<QuantizedGreedySubject>(bits, spec.number_or("a", 1.0), ctx);
  }
  if (spec.kind == "noisy-human") {
    NoisyHumanParams p;
    p.motor_noise_sd = spec.number_or("sd", p.motor_noise_sd);
    p.internal_delay = spec.number_or("delay", p.internal_delay);
    p.internal_rate = static_cast<int>(spec.number_or("rate", p.internal_rate));
    p.gain = spec.number_or("gain", p.gain);
    p.lead = spec.number_or("lead", p.lead);
    p.seed = static_cast<std::uint64_t>(spec.number_or("seed", 0.0));
    return std::make_unique<NoisyHumanSubject>(p, ctx);
  }
  if (spec.kind == "constant") {
    return std::make_unique<ConstantSubject>(spec.number_or("angle", 0.0));
  }
  throw std::invalid_argument("subject kind '" + spec.kind + "' cannot run headless");
}

}  // namespace wheelcon
