#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "wheelcon/signal.hpp"

namespace wheelcon {

// Exhaustive value of the alternating quantized-control game
//
//   x(0) = 0,  x(t+1) = x(t) + u(t) + r(t),  u(t) in S,  r(t) in grid,
//
// where the controller commits u(t) before the adversary reveals r(t) and the
// cost is max_{1 <= t <= N} |x(t)|. The present error is a sufficient
// statistic for the remaining cost (the running maximum only enters through
// max(m, .), which commutes with min and max), so optimising over the current
// x is the same as optimising over full-history controllers.

struct MinimaxLimits {
  int max_horizon = 12;
  std::size_t max_levels = 4;
  std::size_t max_grid = 3;
};

struct MinimaxResult {
  double value = 0.0;
  /// max |u| along the principal line (optimal controller vs worst adversary).
  double worst_case_sup_u = 0.0;
  std::size_t states = 0;
};

class MinimaxBudgetError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

class MinimaxSolver {
 public:
  MinimaxSolver(int horizon, std::span<const double> levels, std::span<const double> grid)
      : horizon_(horizon), levels_(levels.begin(), levels.end()), grid_(grid.begin(), grid.end()),
        memo_(static_cast<std::size_t>(horizon) + 1) {}

  double value(int depth, double x) {
    if (depth == horizon_) return 0.0;
    auto& table = memo_[static_cast<std::size_t>(depth)];
    if (auto it = table.find(x); it != table.end()) return it->second;
    double best = std::numeric_limits<double>::infinity();
    for (double u : levels_) best = std::min(best, worst_reply(depth, x, u));
    table.emplace(x, best);
    return best;
  }

  /// Adversary's best response to u from state x.
  double worst_reply(int depth, double x, double u) {
    double worst = -std::numeric_limits<double>::infinity();
    for (double r : grid_) {
      const double next = x + u + r;
      worst = std::max(worst, std::max(std::abs(next), value(depth + 1, next)));
    }
    return worst;
  }

  /// Walks the principal line; controller ties go to the smaller |u|.
  double principal_sup_u() {
    double x = 0.0;
    double sup_u = 0.0;
    for (int d = 0; d < horizon_; ++d) {
      const double target = value(d, x);
      double chosen = levels_.front();
      bool found = false;
      for (double u : levels_) {
        if (worst_reply(d, x, u) == target && (!found || std::abs(u) < std::abs(chosen))) {
          chosen = u;
          found = true;
        }
      }
      sup_u = std::max(sup_u, std::abs(chosen));
      double worst_next = x + chosen + grid_.front();
      double worst_cost = -std::numeric_limits<double>::infinity();
      for (double r : grid_) {
        const double next = x + chosen + r;
        const double cost = std::max(std::abs(next), value(d + 1, next));
        if (cost > worst_cost) {
          worst_cost = cost;
          worst_next = next;
        }
      }
      x = worst_next;
    }
    return sup_u;
  }

  std::size_t states() const {
    std::size_t n = 0;
    for (const auto& t : memo_) n += t.size();
    return n;
  }

 private:
  int horizon_;
  std::vector<double> levels_;
  std::vector<double> grid_;
  std::vector<std::unordered_map<double, double>> memo_;
};

}  // namespace detail

inline MinimaxResult minimax_value(int horizon, std::span<const double> levels,
                                   std::span<const double> grid,
                                   const MinimaxLimits& limits = {}) {
  if (horizon < 0 || horizon > limits.max_horizon || levels.size() > limits.max_levels ||
      grid.size() > limits.max_grid) {
    throw MinimaxBudgetError("minimax budget exceeded: horizon " + std::to_string(horizon) +
                             " (max " + std::to_string(limits.max_horizon) + "), |S| " +
                             std::to_string(levels.size()) + " (max " +
                             std::to_string(limits.max_levels) + "), |grid| " +
                             std::to_string(grid.size()) + " (max " +
                             std::to_string(limits.max_grid) + ")");
  }
  if (levels.empty() || grid.empty()) throw std::invalid_argument("minimax: empty level set or grid");
  if (horizon == 0) return {};
  detail::MinimaxSolver solver(horizon, levels, grid);
  MinimaxResult out;
  out.value = solver.value(0, 0.0);
  out.worst_case_sup_u = solver.principal_sup_u();
  out.states = solver.states();
  return out;
}

/// Uniform symmetric level set of 2^R values with largest magnitude `scale`.
inline std::vector<double> uniform_levels(int bits, double scale) {
  return action_levels(bits, scale);
}

struct LevelSearchResult {
  double scale = 0.0;
  MinimaxResult game;
};

/// Chooses the level scale that minimises the game value: a coarse scan over
/// [lo, hi] followed by golden-section refinement around the best scan point.
inline LevelSearchResult search_level_scale(int bits, int horizon, std::span<const double> grid,
                                            double lo = 0.05, double hi = 3.0,
                                            int coarse = 60, int refine = 40) {
  auto eval = [&](double a) {
    const auto levels = uniform_levels(bits, a);
    return minimax_value(horizon, levels, grid);
  };
  LevelSearchResult best{lo, eval(lo)};
  const double step = (hi - lo) / coarse;
  for (int i = 1; i <= coarse; ++i) {
    const double a = lo + step * i;
    auto g = eval(a);
    if (g.value < best.game.value) best = {a, g};
  }
  double a = std::max(lo, best.scale - step);
  double b = std::min(hi, best.scale + step);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  auto gc = eval(c);
  auto gd = eval(d);
  for (int i = 0; i < refine; ++i) {
    if (gc.value <= gd.value) {
      b = d;
      d = c;
      gd = gc;
      c = b - phi * (b - a);
      gc = eval(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + phi * (b - a);
      gd = eval(d);
    }
  }
  if (gc.value < best.game.value) best = {c, gc};
  if (gd.value < best.game.value) best = {d, gd};
  return best;
}

/// 1 / 2^(R-1): lower bound on the worst-case error of any R-bit controller.
inline double rate_error_bound(int bits) { return std::ldexp(1.0, 1 - bits); }

/// (1 + 1/2^(R-1)) (1 - 1/2^R), reported next to the oracle's effort.
inline double rate_effort_bound(int bits) {
  return (1.0 + std::ldexp(1.0, 1 - bits)) * (1.0 - std::ldexp(1.0, -bits));
}

}  // namespace wheelcon
