#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wheelcon/engine.hpp"
#include "wheelcon/script.hpp"

namespace wheelcon {

// Session logs are two CSV files sharing a '#' header:
//
//   log.csv          # key=value ...      then  t,x,u       (one row per tick)
//   log.inputs.csv   # key=value ...      then  t,angle     (one row per tick)
//
// Values are written in shortest round-trip form, so a log read back from
// disk compares bit-equal with the one that was written.

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::filesystem::path inputs_path(const std::filesystem::path& log_path) {
  std::string s = log_path.string();
  if (s.size() >= 4 && s.compare(s.size() - 4, 4, ".csv") == 0) s.resize(s.size() - 4);
  return s + ".inputs.csv";
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "': file not found or unreadable");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline std::string header_text(const Metadata& header) {
  std::string out;
  for (const auto& [k, v] : header.entries()) out += "# " + k + "=" + v + "\n";
  return out;
}

inline std::string log_text(const SessionLog& log) {
  std::string out = header_text(log.header);
  out += "t,x,u\n";
  for (const auto& r : log.records) {
    out += format_exact(r.t) + "," + format_exact(r.x) + "," + format_exact(r.u) + "\n";
  }
  return out;
}

inline std::string input_trace_text(const SessionLog& log) {
  std::string out = header_text(log.header);
  out += "t,angle\n";
  for (std::size_t i = 0; i < log.input_trace.size(); ++i) {
    out += format_exact(ticks_to_seconds(static_cast<std::int64_t>(i))) + "," +
           format_exact(log.input_trace[i]) + "\n";
  }
  return out;
}

inline void write_log(const SessionLog& log, const std::filesystem::path& path) {
  write_text_file(path, log_text(log));
  write_text_file(inputs_path(path), input_trace_text(log));
}

namespace detail {

/// Splits a CSV body into the '#' header and numeric rows of `columns` fields.
inline std::vector<std::vector<double>> parse_csv(std::string_view text, std::size_t columns,
                                                  std::string_view column_line, Metadata& header,
                                                  const std::string& what) {
  std::vector<std::vector<double>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool seen_columns = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto body = std::string_view(line).substr(1);
      while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      auto eq = body.find('=');
      if (eq == std::string_view::npos) {
        throw IoError(what + ": malformed header at line " + std::to_string(lineno));
      }
      header.set(std::string(body.substr(0, eq)), std::string(body.substr(eq + 1)));
      continue;
    }
    if (!seen_columns && line == column_line) {
      seen_columns = true;
      continue;
    }
    std::vector<double> row;
    std::size_t start = 0;
    for (;;) {
      auto comma = line.find(',', start);
      auto field = std::string_view(line).substr(
          start, comma == std::string::npos ? std::string::npos : comma - start);
      auto v = parse_number(field);
      if (!v) throw IoError(what + ": non-numeric field at line " + std::to_string(lineno));
      row.push_back(*v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (row.size() != columns) {
      throw IoError(what + ": expected " + std::to_string(columns) + " fields at line " +
                    std::to_string(lineno));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline SessionLog parse_log(std::string_view log_csv, std::string_view inputs_csv = {}) {
  SessionLog log;
  for (const auto& r : detail::parse_csv(log_csv, 3, "t,x,u", log.header, "log")) {
    log.records.push_back({r[0], r[1], r[2]});
  }
  if (!inputs_csv.empty()) {
    Metadata ignored;
    for (const auto& r : detail::parse_csv(inputs_csv, 2, "t,angle", ignored, "input trace")) {
      log.input_trace.push_back(r[1]);
    }
  }
  return log;
}

inline SessionLog read_log(const std::filesystem::path& path) {
  const std::string body = read_text_file(path);
  const auto trace = inputs_path(path);
  std::string inputs;
  if (std::filesystem::exists(trace)) inputs = read_text_file(trace);
  return parse_log(body, inputs);
}

/// Rebuilds the session config recorded in a log header around a schedule.
inline SessionConfig config_from_header(const Metadata& h, ParameterSchedule schedule) {
  SessionConfig c = SessionConfig::for_schedule(std::move(schedule));
  auto num = [&](const char* key, double fallback) {
    auto v = h.get(key);
    if (!v) return fallback;
    auto n = parse_number(*v);
    if (!n) throw IoError(std::string("log header field '") + key + "' is not a number");
    return *n;
  };
  c.mode = h.get_or("mode", "game") == "model" ? UnitMode::kModel : UnitMode::kGame;
  c.sensitivity = num("sensitivity", c.sensitivity);
  c.max_angle = num("max_angle", c.max_angle);
  c.bump_gain = num("bump_gain", c.bump_gain);
  c.lookbehind = num("lookbehind", c.lookbehind);
  c.screen_scale = num("screen_scale", c.screen_scale);
  c.quantize_vision = h.get_or("quantize_vision", c.quantize_vision ? "1" : "0") == "1";
  c.quantize_action = h.get_or("quantize_action", c.quantize_action ? "1" : "0") == "1";
  return c;
}

}  // namespace wheelcon
