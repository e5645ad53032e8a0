#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "wheelcon/plant.hpp"

namespace wheelcon {

inline constexpr int kMinRateBits = 1;
inline constexpr int kMaxRateBits = 10;

inline void check_rate_bits(int bits) {
  if (bits < kMinRateBits || bits > kMaxRateBits) {
    throw std::invalid_argument("rate bits must be in [1, 10]");
  }
}

/// Fixed-length FIFO. push() returns the sample pushed delay_ticks calls
/// earlier, or zero while the line is still filling.
class DelayLine {
 public:
  explicit DelayLine(std::int64_t delay_ticks = 0) {
    if (delay_ticks < 0) throw std::invalid_argument("negative delay");
    buffer_.assign(static_cast<std::size_t>(delay_ticks), 0.0);
  }

  std::int64_t delay_ticks() const {
    return static_cast<std::int64_t>(buffer_.size());
  }

  double push(double sample) {
    if (buffer_.empty()) return sample;
    const double out = buffer_[head_];
    buffer_[head_] = sample;
    head_ = (head_ + 1) % buffer_.size();
    return out;
  }

  /// Samples still in flight, oldest first.
  std::vector<double> pending() const {
    std::vector<double> out;
    out.reserve(buffer_.size());
    for (std::size_t i = 0; i < buffer_.size(); ++i) {
      out.push_back(buffer_[(head_ + i) % buffer_.size()]);
    }
    return out;
  }

  /// Changes the delay in place. Growing inserts zeros at the output end so
  /// no queued sample is lost; shrinking drops the oldest samples.
  void resize(std::int64_t delay_ticks) {
    if (delay_ticks < 0) throw std::invalid_argument("negative delay");
    auto queued = pending();
    const auto n = static_cast<std::size_t>(delay_ticks);
    if (n >= queued.size()) {
      queued.insert(queued.begin(), n - queued.size(), 0.0);
    } else {
      queued.erase(queued.begin(),
                   queued.begin() + static_cast<std::ptrdiff_t>(queued.size() - n));
    }
    buffer_ = std::move(queued);
    head_ = 0;
  }

 private:
  std::vector<double> buffer_;
  std::size_t head_ = 0;
};

/// Mid-rise uniform quantizer on [0, 1]: the centre of the 2^R-bin cell that
/// contains pos. Positions outside [0, 1] are clamped first.
inline double quantize_vision(double pos, int bits) {
  check_rate_bits(bits);
  const double levels = std::ldexp(1.0, bits);
  const double p = std::clamp(pos, 0.0, 1.0);
  const double cell = std::min(std::floor(p * levels), levels - 1.0);
  return (cell + 0.5) / levels;
}

/// The 2^R output values of quantize_vision, ascending.
inline std::vector<double> vision_levels(int bits) {
  check_rate_bits(bits);
  const int n = 1 << bits;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.push_back((i + 0.5) / static_cast<double>(n));
  }
  return out;
}

/// Maps a wheel angle to one of 2^R signed speeds
/// {+-k * max_speed / 2^(R-1) : k = 1..2^(R-1)}. There is no zero level;
/// angle 0 maps to the slowest rightward speed and magnitude ties round up.
inline double quantize_action(double angle, int bits, double max_angle,
                              double max_speed) {
  check_rate_bits(bits);
  if (!(max_angle > 0.0) || !(max_speed > 0.0)) {
    throw std::invalid_argument("quantize_action: non-positive range");
  }
  const double a = std::clamp(angle, -max_angle, max_angle);
  const double half = std::ldexp(1.0, bits - 1);
  const double step = max_speed / half;
  const double magnitude = std::abs(a) / max_angle * max_speed;
  const double k = std::clamp(std::floor(magnitude / step + 0.5), 1.0, half);
  const double speed = k * step;
  return a >= 0.0 ? speed : -speed;
}

/// The 2^R output values of quantize_action, ascending.
inline std::vector<double> action_levels(int bits, double max_speed) {
  check_rate_bits(bits);
  const int half = 1 << (bits - 1);
  const double step = max_speed / half;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(2 * half));
  for (int k = half; k >= 1; --k) out.push_back(-k * step);
  for (int k = 1; k <= half; ++k) out.push_back(k * step);
  return out;
}

/// Look-ahead window. vision_delay < 0 is advance warning (trail visible
/// ahead of the present), > 0 hides the most recent trail.
struct VisionWindow {
  double vision_delay = 0.0;
  double lookbehind = 2.0;
};

struct TrailSample {
  std::int64_t tick = 0;
  double pos = 0.0;
};

/// Trail samples on [t - lookbehind, t - vision_delay] at tick resolution.
/// Ticks outside the track take the nearest boundary value.
inline std::vector<TrailSample> visible_segment(std::span<const double> trail,
                                                std::int64_t t,
                                                const VisionWindow& win) {
  std::vector<TrailSample> out;
  if (trail.empty()) return out;
  const std::int64_t first = t - seconds_to_ticks(win.lookbehind);
  const std::int64_t last = t - seconds_to_ticks(win.vision_delay);
  if (last < first) return out;
  const auto n = static_cast<std::int64_t>(trail.size());
  out.reserve(static_cast<std::size_t>(last - first + 1));
  for (std::int64_t s = first; s <= last; ++s) {
    const auto idx = std::clamp<std::int64_t>(s, 0, n - 1);
    out.push_back({s, trail[static_cast<std::size_t>(idx)]});
  }
  return out;
}

}  // namespace wheelcon
