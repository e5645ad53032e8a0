#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wheelcon/plant.hpp"
#include "wheelcon/prng.hpp"

namespace wheelcon {

enum class TrackKind { kTrailPosition, kBumpForce };

struct Track {
  double dt = kTickSeconds;
  std::vector<double> samples;
  TrackKind kind = TrackKind::kTrailPosition;

  std::size_t size() const { return samples.size(); }
  double operator[](std::size_t i) const { return samples[i]; }
};

/// Stream tags for derive_seed; trail and bumps never share a stream.
enum class Stream : std::uint64_t {
  kTrail = 1,
  kBumps = 2,
  kFitts = 3,
  kSubject = 4,
};

inline std::uint64_t stream_seed(std::uint64_t seed, Stream s) {
  return derive_seed(seed, static_cast<std::uint64_t>(s));
}

inline std::int64_t duration_ticks(double duration) {
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be > 0");
  return std::max<std::int64_t>(1, seconds_to_ticks(duration));
}

/// Trail speed (normalized screen widths per second) that requires the wheel
/// to be held at `wheel_degrees` under a sensitivity of `sensitivity`
/// (screen widths per tick per degree).
inline double calibrated_trail_speed(double sensitivity,
                                     double wheel_degrees = 75.0) {
  return wheel_degrees * sensitivity / kTickSeconds;
}

struct TrailOptions {
  double speed = 0.3;
  double margin = 0.1;
  /// Direction is resampled at this period; each boundary flips with p=1/2.
  double switch_period = 0.1;
};

/// Constant-speed trail that starts at the screen centre and randomly
/// reverses; reversal is forced when the next step would leave
/// [margin, 1 - margin].
inline Track gen_trail(double duration, std::uint64_t seed,
                       const TrailOptions& opt = {}) {
  if (!(opt.speed > 0.0)) throw std::invalid_argument("trail speed must be > 0");
  if (!(opt.margin > 0.0 && opt.margin < 0.5)) {
    throw std::invalid_argument("trail margin must be in (0, 0.5)");
  }
  const double step = opt.speed * kTickSeconds;
  if (2.0 * step > 1.0 - 2.0 * opt.margin) {
    throw std::invalid_argument("trail speed too large for margins");
  }
  const std::int64_t n = duration_ticks(duration);
  const std::int64_t period = std::max<std::int64_t>(1, seconds_to_ticks(opt.switch_period));
  Prng rng(stream_seed(seed, Stream::kTrail));
  const double lo = opt.margin;
  const double hi = 1.0 - opt.margin;

  Track out{kTickSeconds, {}, TrackKind::kTrailPosition};
  out.samples.reserve(static_cast<std::size_t>(n));
  double pos = 0.5;
  double dir = rng.coin() ? 1.0 : -1.0;
  out.samples.push_back(pos);
  for (std::int64_t i = 1; i < n; ++i) {
    if (i % period == 0 && rng.coin()) dir = -dir;
    if (pos + dir * step > hi || pos + dir * step < lo) dir = -dir;
    pos += dir * step;
    out.samples.push_back(pos);
  }
  return out;
}

struct BumpOptions {
  double amplitude = 100.0;
  double segment = 0.1;
  /// Strict sign alternation instead of an independent draw per segment.
  bool alternate = false;
};

/// Binary +-A force, constant over each segment.
inline Track gen_bumps(double duration, std::uint64_t seed,
                       const BumpOptions& opt = {}) {
  if (!(opt.amplitude > 0.0)) throw std::invalid_argument("bump amplitude must be > 0");
  const double seg_ticks_exact = opt.segment / kTickSeconds;
  const auto seg_ticks = static_cast<std::int64_t>(std::llround(seg_ticks_exact));
  if (seg_ticks < 1 || std::abs(seg_ticks_exact - static_cast<double>(seg_ticks)) > 1e-9) {
    throw std::invalid_argument("bump segment must be a positive multiple of the tick");
  }
  const std::int64_t n = duration_ticks(duration);
  Prng rng(stream_seed(seed, Stream::kBumps));
  Track out{kTickSeconds, {}, TrackKind::kBumpForce};
  out.samples.reserve(static_cast<std::size_t>(n));
  double sign = rng.coin() ? 1.0 : -1.0;
  for (std::int64_t i = 0; i < n; ++i) {
    if (i > 0 && i % seg_ticks == 0) {
      sign = opt.alternate ? -sign : (rng.coin() ? 1.0 : -1.0);
    }
    out.samples.push_back(sign * opt.amplitude);
  }
  return out;
}

struct FittsZone {
  double time = 0.0;
  double center = 0.5;
  double width = 0.1;

  bool contains(double pos) const { return std::abs(pos - center) <= width / 2.0; }
};

struct FittsSchedule {
  std::vector<FittsZone> jumps;

  /// Zone active at time t (the last jump at or before t).
  const FittsZone& zone_at(double t) const {
    std::size_t i = 0;
    while (i + 1 < jumps.size() && jumps[i + 1].time <= t + 1e-9) ++i;
    return jumps[i];
  }
};

struct FittsOptions {
  double min_interval = 3.0;
  double max_interval = 6.0;
};

/// Target-zone jumps for the reaching task. The first zone is centred on
/// screen at t = 0; every later jump moves the centre by a drawn distance in
/// a direction that keeps the zone on screen.
inline FittsSchedule gen_fitts(double duration, std::uint64_t seed,
                               const std::vector<double>& widths,
                               const std::vector<double>& distances,
                               const FittsOptions& opt = {}) {
  if (widths.empty() || distances.empty()) {
    throw std::invalid_argument("fitts: widths and distances must be non-empty");
  }
  for (double w : widths) {
    if (!(w > 0.0 && w <= 1.0)) throw std::invalid_argument("fitts: width out of range");
    for (double d : distances) {
      if (!(d > 0.0) || d + w > 1.0) {
        throw std::invalid_argument("fitts: unrealizable distance/width combination");
      }
    }
  }
  if (!(opt.min_interval > 0.0 && opt.max_interval >= opt.min_interval)) {
    throw std::invalid_argument("fitts: bad jump interval");
  }
  const std::int64_t n = duration_ticks(duration);
  Prng rng(stream_seed(seed, Stream::kFitts));

  FittsSchedule out;
  double center = 0.5;
  out.jumps.push_back({0.0, center, widths[rng.below(widths.size())]});
  std::int64_t tick = 0;
  for (;;) {
    tick += seconds_to_ticks(rng.uniform(opt.min_interval, opt.max_interval));
    if (tick >= n) break;
    const double w = widths[rng.below(widths.size())];
    const double d = distances[rng.below(distances.size())];
    const bool right_ok = center + d + w / 2.0 <= 1.0;
    const bool left_ok = center - d - w / 2.0 >= 0.0;
    if (!right_ok && !left_ok) {
      throw std::invalid_argument("fitts: no on-screen jump of the drawn distance");
    }
    bool right = rng.coin();
    if (!right_ok) right = false;
    if (!left_ok) right = true;
    center = right ? center + d : center - d;
    out.jumps.push_back({ticks_to_seconds(tick), center, w});
  }
  return out;
}

}  // namespace wheelcon
