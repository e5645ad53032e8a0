#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wheelcon {

/// One engine tick in seconds. Schedules, delays and logs are all resolved
/// on this grid.
inline constexpr double kTickSeconds = 0.01;

/// Nearest tick count for a duration in seconds.
inline std::int64_t seconds_to_ticks(double seconds) {
  return static_cast<std::int64_t>(std::llround(seconds / kTickSeconds));
}

inline double ticks_to_seconds(std::int64_t ticks) {
  return static_cast<double>(ticks) / 100.0;
}

/// Model mode is the dimensionless integrator used for the theory checks;
/// game mode scales x to 100-pixel units and u to wheel degrees.
enum class UnitMode { kModel, kGame };

struct PlantState {
  std::int64_t t = 0;
  double x = 0.0;
};

struct StepInputs {
  double u = 0.0;
  double r = 0.0;
  double w = 0.0;
};

/// x(t+1) = x(t) + w(t) + u(t) + r(t).
inline PlantState step_plant(const PlantState& state, const StepInputs& in) {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string("step_plant: non-finite ") +
                                  name);
    }
  };
  check(state.x, "x");
  check(in.u, "u");
  check(in.r, "r");
  check(in.w, "w");
  return PlantState{state.t + 1, state.x + in.w + in.u + in.r};
}

/// Closed-form error trajectory when the controller plays u(t + T) = -r(t):
/// x(t) = sum_{s = t - T}^{t - 1} r(s), with r zero before the start.
/// Returns x(0..n) for an r history of length n.
inline std::vector<double> telescoped_error(std::span<const double> r,
                                            std::int64_t delay_ticks) {
  if (delay_ticks < 0) {
    throw std::invalid_argument("telescoped_error: negative delay");
  }
  const auto n = static_cast<std::int64_t>(r.size());
  std::vector<double> x(static_cast<std::size_t>(n + 1), 0.0);
  for (std::int64_t t = 1; t <= n; ++t) {
    double sum = 0.0;
    for (std::int64_t s = std::max<std::int64_t>(0, t - delay_ticks); s < t;
         ++s) {
      sum += r[static_cast<std::size_t>(s)];
    }
    x[static_cast<std::size_t>(t)] = sum;
  }
  return x;
}

}  // namespace wheelcon
