#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "wheelcon/analysis.hpp"
#include "wheelcon/engine.hpp"

namespace wheelcon::wire {

// Text messages, one JSON object per websocket message. Every message has
// "kind", "seq" and "proto_version". Numbers are written in shortest
// round-trip form, so angles and positions survive the trip bit-exactly.
//
//   server -> client   hello, config, frame, event, summary, error
//   client -> server   hello, input
//
// A session: server hello, client hello (same proto_version), server config,
// then one frame per tick answered by inputs, then summary and close.

inline constexpr int kProtoVersion = 1;

using json = nlohmann::json;

class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

struct Hello {
  std::int64_t seq = 0;
  int proto_version = kProtoVersion;
  std::string role = "server";
  std::string schedule_hash;
  std::string config_hash;
  int tick_rate = 100;
  std::int64_t end_tick = 0;
};

struct Config {
  std::int64_t seq = 0;
  std::string game;
  std::string mode;
  double max_angle = 0.0;
  double sensitivity = 0.0;
  double lookbehind = 0.0;
  double screen_scale = 0.0;
  std::vector<BlockSpan> blocks;
};

struct WireSample {
  double dt_ahead = 0.0;
  double pos = 0.0;
};

struct WireFrame {
  std::int64_t seq = 0;
  double t = 0.0;
  double player = 0.0;
  std::vector<WireSample> trail_window;
  ScheduleRow block;
  std::optional<FittsZone> fitts_zone;
};

struct WireInput {
  std::int64_t seq = 0;
  std::int64_t seq_ack = -1;
  double angle = 0.0;
  double timestamp = 0.0;
};

struct Event {
  std::int64_t seq = 0;
  std::string name;
  std::size_t block = 0;
  std::string param;
};

struct Summary {
  std::int64_t seq = 0;
  std::string status;
  std::vector<NormRow> rows;
  SessionDiagnostics diagnostics;
  double measured_hz = 0.0;
  std::string log_path;
};

struct Error {
  std::int64_t seq = 0;
  std::string code;
  std::string message;
};

inline WireFrame to_wire(const Frame& f) {
  WireFrame w;
  w.seq = f.seq;
  w.t = f.t;
  w.player = f.player;
  w.block = f.block;
  w.fitts_zone = f.fitts_zone;
  w.trail_window.reserve(f.trail_window.size());
  for (const auto& s : f.trail_window) {
    w.trail_window.push_back({ticks_to_seconds(s.tick - f.seq), s.pos});
  }
  return w;
}

namespace detail {

inline json envelope(const char* kind, std::int64_t seq) {
  return json{{"kind", kind}, {"seq", seq}, {"proto_version", kProtoVersion}};
}

template <typename T>
T field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ProtocolError("protocol_error", std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ProtocolError("protocol_error", std::string("bad type for field '") + key + "'");
  }
}

inline json row_json(const ScheduleRow& r) {
  return json{{"r", r.trail},        {"w", r.bump},          {"R_act", r.rate_act},
              {"T_act", r.delay_act}, {"T_vis", r.delay_vis}, {"R_vis", r.rate_vis}};
}

inline ScheduleRow row_from(const json& j) {
  ScheduleRow r;
  r.trail = field<double>(j, "r");
  r.bump = field<double>(j, "w");
  r.rate_act = field<int>(j, "R_act");
  r.delay_act = field<double>(j, "T_act");
  r.delay_vis = field<double>(j, "T_vis");
  r.rate_vis = field<int>(j, "R_vis");
  return r;
}

}  // namespace detail

inline std::string encode(const Hello& m) {
  json j = detail::envelope("hello", m.seq);
  j["proto_version"] = m.proto_version;
  j["role"] = m.role;
  if (m.role == "server") {
    j["schedule_hash"] = m.schedule_hash;
    j["config_hash"] = m.config_hash;
    j["tick_rate"] = m.tick_rate;
    j["end_tick"] = m.end_tick;
  }
  return j.dump();
}

inline std::string encode(const Config& m) {
  json j = detail::envelope("config", m.seq);
  j["game"] = m.game;
  j["mode"] = m.mode;
  j["max_angle"] = m.max_angle;
  j["sensitivity"] = m.sensitivity;
  j["lookbehind"] = m.lookbehind;
  j["screen_scale"] = m.screen_scale;
  j["blocks"] = json::array();
  for (const auto& b : m.blocks) {
    j["blocks"].push_back({{"start", b.start}, {"end", b.end}, {"label", b.label}});
  }
  return j.dump();
}

inline std::string encode(const WireFrame& m) {
  json j = detail::envelope("frame", m.seq);
  j["t"] = m.t;
  j["player"] = m.player;
  json window = json::array();
  for (const auto& s : m.trail_window) window.push_back(json::array({s.dt_ahead, s.pos}));
  j["trail_window"] = std::move(window);
  j["block"] = detail::row_json(m.block);
  if (m.fitts_zone) {
    j["fitts_zone"] = {{"center", m.fitts_zone->center}, {"width", m.fitts_zone->width}};
  } else {
    j["fitts_zone"] = nullptr;
  }
  return j.dump();
}

inline std::string encode(const WireInput& m) {
  json j = detail::envelope("input", m.seq);
  j["seq_ack"] = m.seq_ack;
  j["angle"] = m.angle;
  j["timestamp"] = m.timestamp;
  return j.dump();
}

inline std::string encode(const Event& m) {
  json j = detail::envelope("event", m.seq);
  j["name"] = m.name;
  j["block"] = m.block;
  j["param"] = m.param;
  return j.dump();
}

inline std::string encode(const Summary& m) {
  json j = detail::envelope("summary", m.seq);
  j["status"] = m.status;
  j["rows"] = json::array();
  for (const auto& r : m.rows) {
    j["rows"].push_back({{"block", r.block},
                         {"param", r.param},
                         {"L1", r.norms.l1},
                         {"L2", r.norms.l2},
                         {"Linf", r.norms.linf},
                         {"n", r.n},
                         {"flagged", r.flagged}});
  }
  j["diagnostics"] = {{"vision_clamped", m.diagnostics.vision_clamped},
                      {"angle_clamped", m.diagnostics.angle_clamped},
                      {"late_input", m.diagnostics.late_input}};
  j["measured_hz"] = m.measured_hz;
  j["log_path"] = m.log_path;
  return j.dump();
}

inline std::string encode(const Error& m) {
  json j = detail::envelope("error", m.seq);
  j["code"] = m.code;
  j["message"] = m.message;
  return j.dump();
}

/// Parses a message and checks the envelope. Returns the JSON and its kind.
inline json parse(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ProtocolError("protocol_error", "message is not a JSON object");
  (void)detail::field<std::string>(j, "kind");
  (void)detail::field<std::int64_t>(j, "seq");
  (void)detail::field<int>(j, "proto_version");
  return j;
}

inline std::string kind_of(const json& j) { return detail::field<std::string>(j, "kind"); }

inline Hello decode_hello(const json& j) {
  Hello m;
  m.seq = detail::field<std::int64_t>(j, "seq");
  m.proto_version = detail::field<int>(j, "proto_version");
  m.role = j.value("role", std::string());
  m.schedule_hash = j.value("schedule_hash", std::string());
  m.config_hash = j.value("config_hash", std::string());
  m.tick_rate = j.value("tick_rate", 0);
  m.end_tick = j.value("end_tick", std::int64_t{0});
  return m;
}

inline Config decode_config(const json& j) {
  Config m;
  m.seq = detail::field<std::int64_t>(j, "seq");
  m.game = detail::field<std::string>(j, "game");
  m.mode = detail::field<std::string>(j, "mode");
  m.max_angle = detail::field<double>(j, "max_angle");
  m.sensitivity = detail::field<double>(j, "sensitivity");
  m.lookbehind = detail::field<double>(j, "lookbehind");
  m.screen_scale = detail::field<double>(j, "screen_scale");
  for (const auto& b : detail::field<json>(j, "blocks")) {
    m.blocks.push_back({detail::field<double>(b, "start"), detail::field<double>(b, "end"),
                        detail::field<std::string>(b, "label")});
  }
  return m;
}

inline WireFrame decode_frame(const json& j) {
  WireFrame m;
  m.seq = detail::field<std::int64_t>(j, "seq");
  m.t = detail::field<double>(j, "t");
  m.player = detail::field<double>(j, "player");
  for (const auto& s : detail::field<json>(j, "trail_window")) {
    if (!s.is_array() || s.size() != 2 || !s[0].is_number() || !s[1].is_number()) {
      throw ProtocolError("protocol_error", "bad trail sample");
    }
    m.trail_window.push_back({s[0].get<double>(), s[1].get<double>()});
  }
  m.block = detail::row_from(detail::field<json>(j, "block"));
  auto z = j.find("fitts_zone");
  if (z != j.end() && !z->is_null()) {
    FittsZone zone;
    zone.time = m.t;
    zone.center = detail::field<double>(*z, "center");
    zone.width = detail::field<double>(*z, "width");
    m.fitts_zone = zone;
  }
  return m;
}

inline WireInput decode_input(const json& j) {
  WireInput m;
  m.seq = detail::field<std::int64_t>(j, "seq");
  m.seq_ack = detail::field<std::int64_t>(j, "seq_ack");
  m.angle = detail::field<double>(j, "angle");
  m.timestamp = j.value("timestamp", 0.0);
  return m;
}

inline Event decode_event(const json& j) {
  Event m;
  m.seq = detail::field<std::int64_t>(j, "seq");
  m.name = detail::field<std::string>(j, "name");
  m.block = detail::field<std::size_t>(j, "block");
  m.param = detail::field<std::string>(j, "param");
  return m;
}

inline Summary decode_summary(const json& j) {
  Summary m;
  m.seq = detail::field<std::int64_t>(j, "seq");
  m.status = detail::field<std::string>(j, "status");
  for (const auto& r : detail::field<json>(j, "rows")) {
    NormRow row;
    row.block = detail::field<std::size_t>(r, "block");
    row.param = detail::field<std::string>(r, "param");
    row.norms = {detail::field<double>(r, "L1"), detail::field<double>(r, "L2"),
                 detail::field<double>(r, "Linf")};
    row.n = detail::field<std::size_t>(r, "n");
    row.flagged = detail::field<bool>(r, "flagged");
    m.rows.push_back(row);
  }
  const auto& d = detail::field<json>(j, "diagnostics");
  m.diagnostics.vision_clamped = detail::field<std::int64_t>(d, "vision_clamped");
  m.diagnostics.angle_clamped = detail::field<std::int64_t>(d, "angle_clamped");
  m.diagnostics.late_input = detail::field<std::int64_t>(d, "late_input");
  m.measured_hz = detail::field<double>(j, "measured_hz");
  m.log_path = detail::field<std::string>(j, "log_path");
  return m;
}

inline Error decode_error(const json& j) {
  return {detail::field<std::int64_t>(j, "seq"), detail::field<std::string>(j, "code"),
          detail::field<std::string>(j, "message")};
}

}  // namespace wheelcon::wire
