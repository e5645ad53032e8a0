#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wheelcon/disturbance.hpp"
#include "wheelcon/engine.hpp"
#include "wheelcon/log_io.hpp"
#include "wheelcon/script.hpp"

namespace wheelcon {

/// Time-averaged error norms: L1 is the mean of |x|, L2 the root mean
/// square, Linf the maximum of |x|.
struct Norms {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

inline Norms norms(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("norms: empty signal");
  double sum_abs = 0.0;
  double sum_sq = 0.0;
  double peak = 0.0;
  for (double v : x) {
    const double a = std::abs(v);
    sum_abs += a;
    sum_sq += a * a;
    peak = std::max(peak, a);
  }
  const auto n = static_cast<double>(x.size());
  return {sum_abs / n, std::sqrt(sum_sq / n), peak};
}

/// Ranks starting at 1; ties share the mean of their positions.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

/// Spearman rank correlation (Pearson correlation of average ranks).
inline double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("spearman: need two equal-length sequences of length >= 2");
  }
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    da += (ra[i] - ma) * (ra[i] - ma);
    db += (rb[i] - mb) * (rb[i] - mb);
  }
  if (da == 0.0 || db == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return num / std::sqrt(da * db);
}

struct NormRow {
  std::size_t block = 0;
  std::string param;
  double start = 0.0;
  double end = 0.0;
  Norms norms;
  std::size_t n = 0;
  /// Block too short for the requested trim; norms cover the whole block.
  bool flagged = false;
};

struct NormReport {
  std::string param_name;
  std::vector<NormRow> rows;
};

namespace detail {

struct ParamColumn {
  const char* name;
  double (*get)(const ScheduleRow&);
};

inline constexpr ParamColumn kParamColumns[] = {
    {"T_vis", [](const ScheduleRow& r) { return r.delay_vis; }},
    {"T_act", [](const ScheduleRow& r) { return r.delay_act; }},
    {"R_vis", [](const ScheduleRow& r) { return static_cast<double>(r.rate_vis); }},
    {"R_act", [](const ScheduleRow& r) { return static_cast<double>(r.rate_act); }},
};

inline bool same_params(const ScheduleRow& a, const ScheduleRow& b) {
  return a.delay_vis == b.delay_vis && a.delay_act == b.delay_act &&
         a.rate_vis == b.rate_vis && a.rate_act == b.rate_act;
}

}  // namespace detail

/// Blocks of a schedule: the labeled spans in the "blocks" header when
/// present, otherwise maximal runs of constant (T_vis, T_act, R_vis, R_act).
inline std::vector<BlockSpan> schedule_blocks(const ParameterSchedule& sched,
                                              std::string* param_name = nullptr) {
  if (auto labeled = sched.metadata().get("blocks")) {
    if (param_name) *param_name = "scenario";
    return decode_blocks(*labeled);
  }
  const auto& rows = sched.rows();
  std::vector<std::size_t> starts{0};
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!detail::same_params(rows[i], rows[i - 1])) starts.push_back(i);
  }
  const detail::ParamColumn* varying = nullptr;
  for (const auto& col : detail::kParamColumns) {
    for (std::size_t b = 1; b < starts.size() && !varying; ++b) {
      if (col.get(rows[starts[b]]) != col.get(rows[starts[0]])) varying = &col;
    }
  }
  if (param_name) *param_name = varying ? varying->name : "";
  std::vector<BlockSpan> out;
  for (std::size_t b = 0; b < starts.size(); ++b) {
    const double start = rows[starts[b]].time;
    const double end = b + 1 < starts.size() ? rows[starts[b + 1]].time
                                             : ticks_to_seconds(sched.end_tick());
    out.push_back({start, end, varying ? format_number(varying->get(rows[starts[b]])) : ""});
  }
  return out;
}

/// Per-block norms of the logged error over [start + trim, end - trim).
inline NormReport block_norms(const SessionLog& log, const ParameterSchedule& sched,
                              double trim = 5.0) {
  if (!(trim >= 0.0)) throw std::invalid_argument("block_norms: negative trim");
  NormReport report;
  const auto blocks = schedule_blocks(sched, &report.param_name);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& blk = blocks[b];
    NormRow row;
    row.block = b;
    row.param = blk.label;
    const std::int64_t s = seconds_to_ticks(blk.start);
    const std::int64_t e = seconds_to_ticks(blk.end);
    const std::int64_t trim_ticks = seconds_to_ticks(trim);
    std::int64_t a = s + trim_ticks;
    std::int64_t z = e - trim_ticks;
    if (z <= a) {
      row.flagged = true;
      a = s;
      z = e;
    }
    row.start = ticks_to_seconds(a);
    row.end = ticks_to_seconds(z);
    std::vector<double> xs;
    for (const auto& rec : log.records) {
      const std::int64_t t = seconds_to_ticks(rec.t);
      if (t >= a && t < z) xs.push_back(rec.x);
    }
    row.n = xs.size();
    if (!xs.empty()) row.norms = norms(xs);
    else row.flagged = true;
    report.rows.push_back(std::move(row));
  }
  return report;
}

struct MovementTime {
  std::size_t jump = 0;
  double jump_time = 0.0;
  /// Empty when the bar never entered the zone before the next jump.
  std::optional<double> mt;
};

struct MovementSummary {
  double mean_mt = 0.0;
  std::size_t completed = 0;
  double censoring_rate = 0.0;
};

/// Time from each zone jump to the first tick the bar is inside the new
/// zone. The log's x is bar minus zone centre in logged units.
inline std::vector<MovementTime> movement_times(const SessionLog& log, const FittsSchedule& fitts) {
  if (log.header.get_or("game", "") != "fitts") {
    throw std::invalid_argument("movement_times: not a Fitts-task log");
  }
  const double scale = parse_number(log.header.get_or("screen_scale", "1")).value_or(1.0);
  std::vector<MovementTime> out;
  for (std::size_t j = 0; j < fitts.jumps.size(); ++j) {
    const auto& zone = fitts.jumps[j];
    const std::int64_t from = seconds_to_ticks(zone.time);
    const std::int64_t to = j + 1 < fitts.jumps.size()
                                ? seconds_to_ticks(fitts.jumps[j + 1].time)
                                : std::numeric_limits<std::int64_t>::max();
    MovementTime m{j, zone.time, std::nullopt};
    for (const auto& rec : log.records) {
      const std::int64_t t = seconds_to_ticks(rec.t);
      if (t < from) continue;
      if (t >= to) break;
      if (std::abs(rec.x / scale) <= zone.width / 2.0) {
        m.mt = ticks_to_seconds(t - from);
        break;
      }
    }
    out.push_back(m);
  }
  return out;
}

/// Censored trials are left out of the mean and counted in the rate.
inline MovementSummary summarize(const std::vector<MovementTime>& mts) {
  MovementSummary s;
  double total = 0.0;
  for (const auto& m : mts) {
    if (m.mt) {
      total += *m.mt;
      ++s.completed;
    }
  }
  if (s.completed) s.mean_mt = total / static_cast<double>(s.completed);
  if (!mts.empty()) {
    s.censoring_rate =
        static_cast<double>(mts.size() - s.completed) / static_cast<double>(mts.size());
  }
  return s;
}

inline std::string report_text(const NormReport& report) {
  std::string out;
  out += "# param=" + (report.param_name.empty() ? std::string("none") : report.param_name) + "\n";
  out += "# L1=L1-mean (mean |x|) L2=L2-rms (root mean square) Linf=max |x|\n";
  for (const auto& r : report.rows) {
    if (r.flagged) {
      out += "# flagged=block " + std::to_string(r.block) + " shorter than twice the trim\n";
    }
  }
  out += "block,param,L1,L2,Linf,n\n";
  for (const auto& r : report.rows) {
    out += std::to_string(r.block) + "," + r.param + "," + format_exact(r.norms.l1) + "," +
           format_exact(r.norms.l2) + "," + format_exact(r.norms.linf) + "," +
           std::to_string(r.n) + "\n";
  }
  return out;
}

inline void export_report(const NormReport& report, const std::filesystem::path& path) {
  write_text_file(path, report_text(report));
}

inline void export_report(const SessionLog& log, const std::filesystem::path& path) {
  write_log(log, path);
}

}  // namespace wheelcon
