#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "wheelcon/analysis.hpp"
#include "wheelcon/engine.hpp"
#include "wheelcon/log_io.hpp"
#include "wheelcon/wire.hpp"

namespace wheelcon::service {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

enum class Pacing {
  /// Absolute 100 Hz deadlines; the latest angle at each deadline is used.
  kRealtime,
  /// Each tick waits for the input acknowledging its frame. For scripted
  /// drivers that must reproduce a given trace exactly.
  kLockstep,
};

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 0;
  double tick_rate = 100.0;
  Pacing pacing = Pacing::kRealtime;
  /// Where the first session's log goes; later sessions get "<stem>.<n>.csv".
  /// Empty keeps logs in memory only.
  std::filesystem::path log_path;
  /// Stop accepting after this many sessions; 0 means no limit.
  std::size_t max_sessions = 0;
  double trim = 5.0;
};

/// One input message as it arrived, for latency diagnostics.
struct ReceivedInput {
  std::int64_t tick = 0;
  std::int64_t seq_ack = 0;
  double angle = 0.0;
  double timestamp = 0.0;
};

struct SessionResult {
  SessionLog log;
  wire::Summary summary;
  std::vector<ReceivedInput> received;
};

inline std::filesystem::path session_log_path(const std::filesystem::path& base, std::size_t n) {
  if (base.empty() || n <= 1) return base;
  auto p = base;
  p.replace_extension();
  return p.string() + "." + std::to_string(n) + ".csv";
}

inline std::string received_text(const std::vector<ReceivedInput>& rx) {
  std::string out = "tick,seq_ack,angle,timestamp\n";
  for (const auto& r : rx) {
    out += std::to_string(r.tick) + "," + std::to_string(r.seq_ack) + "," +
           format_exact(r.angle) + "," + format_exact(r.timestamp) + "\n";
  }
  return out;
}

class Server;

namespace detail {

/// State shared between the socket side and the engine thread.
struct InputCell {
  std::mutex mu;
  std::condition_variable cv;
  double angle = 0.0;
  std::int64_t seq_ack = -1;
  std::int64_t count = 0;
  bool disconnected = false;
  std::string abort_reason;
  std::vector<ReceivedInput> received;
  std::int64_t current_tick = 0;
};

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, Server& server) : ws_(std::move(socket)), server_(server) {}

  void start() {
    ws_.text(true);
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (!ec) self->on_accept();
    });
  }

  /// Thread-safe: queues a message for the io thread.
  void send(std::string msg) {
    net::post(ws_.get_executor(), [self = shared_from_this(), m = std::move(msg)]() mutable {
      if (self->closing_) return;
      self->outbox_.push_back(std::move(m));
      if (self->outbox_.size() == 1) self->do_write();
    });
  }

  /// Thread-safe: closes once every queued message has been written.
  void close_after_flush(websocket::close_code code = websocket::close_code::normal) {
    net::post(ws_.get_executor(), [self = shared_from_this(), code] {
      if (self->closing_) return;
      self->closing_ = true;
      self->close_code_ = code;
      if (self->outbox_.empty()) self->do_close();
    });
  }

  InputCell& cell() { return cell_; }

 private:
  void on_accept();
  void on_message(std::string_view text);
  void protocol_error(const std::string& code, const std::string& what,
                      websocket::close_code close);

  void do_read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->mark_disconnected();
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->on_message(text);
      if (!self->closing_) self->do_read();
    });
  }

  void do_write() {
    ws_.async_write(net::buffer(outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      self->outbox_.pop_front();
                      if (ec) {
                        self->outbox_.clear();
                        self->mark_disconnected();
                        return;
                      }
                      if (!self->outbox_.empty()) self->do_write();
                      else if (self->closing_) self->do_close();
                    });
  }

  void do_close() {
    ws_.async_close(close_code_, [self = shared_from_this()](beast::error_code) {});
  }

  void mark_disconnected() {
    std::lock_guard lock(cell_.mu);
    if (!cell_.disconnected && cell_.abort_reason.empty()) cell_.abort_reason = "client_disconnected";
    cell_.disconnected = true;
    cell_.cv.notify_all();
  }

  websocket::stream<beast::tcp_stream> ws_;
  Server& server_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  bool closing_ = false;
  bool started_ = false;
  websocket::close_code close_code_ = websocket::close_code::normal;
  InputCell cell_;
};

}  // namespace detail

class Server {
 public:
  Server(SessionConfig config, ServerOptions options)
      : cfg_(std::move(config)), opt_(std::move(options)), acceptor_(ioc_) {
    cfg_.check();
    if (!(opt_.tick_rate > 0.0)) throw std::invalid_argument("tick rate must be > 0");
    const tcp::endpoint ep(net::ip::make_address(opt_.address), opt_.port);
    acceptor_.open(ep.protocol());
    acceptor_.set_option(net::socket_base::reuse_address(true));
    acceptor_.bind(ep);
    acceptor_.listen();
    port_ = acceptor_.local_endpoint().port();
    do_accept();
  }

  ~Server() { stop(); }

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  unsigned short port() const { return port_; }
  const SessionConfig& config() const { return cfg_; }
  const ServerOptions& options() const { return opt_; }

  /// Serves on the calling thread until stop() or the session limit.
  void run() {
    ioc_.run();
    join_engines();
  }

  /// Serves on a background thread.
  void start() {
    io_thread_ = std::thread([this] { ioc_.run(); });
  }

  void stop() {
    stopping_ = true;
    net::post(ioc_, [this] {
      beast::error_code ec;
      acceptor_.close(ec);
    });
    join_engines();
    ioc_.stop();
    if (io_thread_.joinable()) io_thread_.join();
  }

  /// Blocks until `n` sessions have finished or the timeout passes.
  bool wait_for_sessions(std::size_t n, std::chrono::milliseconds timeout) {
    std::unique_lock lock(results_mu_);
    return results_cv_.wait_for(lock, timeout, [&] { return results_.size() >= n; });
  }

  std::vector<SessionResult> results() const {
    std::lock_guard lock(results_mu_);
    return results_;
  }

  bool stopping() const { return stopping_; }

  /// Called on the io thread once a client has completed the handshake.
  void begin_session(std::shared_ptr<detail::Connection> conn) {
    const std::size_t n = ++started_;
    if (opt_.max_sessions != 0 && n >= opt_.max_sessions) {
      beast::error_code ec;
      acceptor_.close(ec);
    }
    std::lock_guard lock(engines_mu_);
    engines_.emplace_back([this, conn, n] { run_session(conn, n); });
  }

 private:
  void do_accept() {
    acceptor_.async_accept(net::make_strand(ioc_), [this](beast::error_code ec, tcp::socket s) {
      if (ec) return;
      // One small message per tick each way: Nagle would stall every round trip.
      s.set_option(tcp::no_delay(true), ec);
      std::make_shared<detail::Connection>(std::move(s), *this)->start();
      if (opt_.max_sessions == 0 || started_ < opt_.max_sessions) do_accept();
    });
  }

  void join_engines() {
    std::vector<std::thread> engines;
    {
      std::lock_guard lock(engines_mu_);
      engines.swap(engines_);
    }
    for (auto& t : engines) {
      if (t.joinable()) t.join();
    }
  }

  void run_session(std::shared_ptr<detail::Connection> conn, std::size_t n);

  SessionConfig cfg_;
  ServerOptions opt_;
  net::io_context ioc_{1};
  tcp::acceptor acceptor_;
  unsigned short port_ = 0;
  std::thread io_thread_;
  std::atomic<bool> stopping_{false};
  std::atomic<std::size_t> started_{0};
  std::mutex engines_mu_;
  std::vector<std::thread> engines_;
  mutable std::mutex results_mu_;
  std::condition_variable results_cv_;
  std::vector<SessionResult> results_;
};

namespace detail {

inline void Connection::on_accept() {
  const auto& cfg = server_.config();
  wire::Hello hello;
  hello.schedule_hash = hex64(schedule_hash(cfg.schedule));
  hello.config_hash = hex64(cfg.hash());
  hello.tick_rate = static_cast<int>(server_.options().tick_rate);
  hello.end_tick = cfg.schedule.end_tick();
  send(wire::encode(hello));
  do_read();
}

inline void Connection::protocol_error(const std::string& code, const std::string& what,
                                       websocket::close_code close) {
  send(wire::encode(wire::Error{0, code, what}));
  {
    std::lock_guard lock(cell_.mu);
    cell_.abort_reason = code;
    cell_.disconnected = true;
    cell_.cv.notify_all();
  }
  close_after_flush(close);
}

inline void Connection::on_message(std::string_view text) {
  try {
    const auto j = wire::parse(text);
    const auto kind = wire::kind_of(j);
    if (!started_) {
      if (kind != "hello") {
        throw wire::ProtocolError("protocol_error", "expected hello, got '" + kind + "'");
      }
      const auto hello = wire::decode_hello(j);
      if (hello.proto_version != wire::kProtoVersion) {
        protocol_error("version_mismatch",
                       "protocol version " + std::to_string(hello.proto_version) +
                           " not supported (server speaks " +
                           std::to_string(wire::kProtoVersion) + ")",
                       websocket::close_code::policy_error);
        return;
      }
      const auto& cfg = server_.config();
      wire::Config c;
      c.game = cfg.schedule.metadata().get_or("game", "custom");
      c.mode = cfg.mode == UnitMode::kModel ? "model" : "game";
      c.max_angle = cfg.max_angle;
      c.sensitivity = cfg.sensitivity;
      c.lookbehind = cfg.lookbehind;
      c.screen_scale = cfg.screen_scale;
      c.blocks = schedule_blocks(cfg.schedule);
      send(wire::encode(c));
      started_ = true;
      server_.begin_session(shared_from_this());
      return;
    }
    if (kind != "input") {
      throw wire::ProtocolError("protocol_error", "unexpected message kind '" + kind + "'");
    }
    const auto in = wire::decode_input(j);
    if (!std::isfinite(in.angle)) throw wire::ProtocolError("protocol_error", "non-finite angle");
    std::lock_guard lock(cell_.mu);
    cell_.angle = in.angle;
    cell_.seq_ack = std::max(cell_.seq_ack, in.seq_ack);
    ++cell_.count;
    cell_.received.push_back({cell_.current_tick, in.seq_ack, in.angle, in.timestamp});
    cell_.cv.notify_all();
  } catch (const wire::ProtocolError& e) {
    protocol_error(e.code(), e.what(), websocket::close_code::protocol_error);
  } catch (const std::exception& e) {
    protocol_error("protocol_error", e.what(), websocket::close_code::protocol_error);
  }
}

}  // namespace detail

inline void Server::run_session(std::shared_ptr<detail::Connection> conn, std::size_t n) {
  using clock = std::chrono::steady_clock;
  const auto period = std::chrono::duration_cast<clock::duration>(
      std::chrono::duration<double>(1.0 / opt_.tick_rate));
  Session session(cfg_);
  SessionLog log;
  log.header = log_header(cfg_, "external");
  const auto blocks = schedule_blocks(cfg_.schedule);
  auto& cell = conn->cell();
  std::int64_t last_count = 0;
  std::int64_t seq = 1;
  std::string abort_reason;

  auto send_events = [&](std::int64_t t) {
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (seconds_to_ticks(blocks[b].end) == t) {
        conn->send(wire::encode(wire::Event{seq++, "block_end", b, blocks[b].label}));
      }
      if (seconds_to_ticks(blocks[b].start) == t) {
        conn->send(wire::encode(wire::Event{seq++, "block_start", b, blocks[b].label}));
      }
    }
  };

  const auto start = clock::now();
  auto deadline = start;
  while (!session.done()) {
    const std::int64_t t = session.now();
    send_events(t);
    conn->send(wire::encode(wire::to_wire(session.frame())));
    double angle = 0.0;
    {
      std::unique_lock lock(cell.mu);
      cell.current_tick = t;
      if (opt_.pacing == Pacing::kRealtime) {
        deadline += period;
        cell.cv.wait_until(lock, deadline, [&] { return cell.disconnected || stopping_; });
      } else {
        while (!(cell.seq_ack >= t || cell.disconnected || stopping_)) {
          cell.cv.wait_for(lock, std::chrono::milliseconds(50));
        }
      }
      if (cell.disconnected || stopping_) {
        abort_reason = stopping_ ? "server_stopped" : cell.abort_reason;
        break;
      }
      if (cell.count == last_count) ++session.diagnostics().late_input;
      last_count = cell.count;
      angle = cell.angle;
    }
    log.input_trace.push_back(angle);
    log.records.push_back(session.tick(angle));
  }
  const double elapsed = std::chrono::duration<double>(clock::now() - start).count();
  if (abort_reason.empty()) send_events(session.now());

  if (!abort_reason.empty()) {
    log.header.set("status", "aborted");
    log.header.set("abort_reason", abort_reason);
  }
  log.header.set("late_input", std::to_string(session.diagnostics().late_input));

  SessionResult result;
  {
    std::lock_guard lock(cell.mu);
    result.received = cell.received;
  }
  const auto path = session_log_path(opt_.log_path, n);
  if (!path.empty()) {
    write_log(log, path);
    auto rx = path;
    rx.replace_extension();
    write_text_file(rx.string() + ".received.csv", received_text(result.received));
  }

  wire::Summary summary;
  summary.seq = seq++;
  summary.status = abort_reason.empty() ? "complete" : "aborted";
  if (!log.records.empty()) summary.rows = block_norms(log, cfg_.schedule, opt_.trim).rows;
  summary.diagnostics = session.diagnostics();
  summary.measured_hz =
      elapsed > 0.0 ? static_cast<double>(log.records.size()) / elapsed : 0.0;
  summary.log_path = path.string();
  conn->send(wire::encode(summary));
  conn->close_after_flush();

  result.log = std::move(log);
  result.summary = summary;
  {
    std::lock_guard lock(results_mu_);
    results_.push_back(std::move(result));
  }
  results_cv_.notify_all();
}

// ---------------------------------------------------------------------------
// Scripted client

struct ClientOptions {
  int proto_version = wire::kProtoVersion;
  /// Drop the connection without a close handshake after this many frames.
  std::optional<std::int64_t> disconnect_after;
};

struct ClientResult {
  wire::Hello hello;
  std::optional<wire::Config> config;
  std::vector<wire::Event> events;
  std::optional<wire::Summary> summary;
  std::optional<wire::Error> error;
  std::int64_t frames = 0;
  std::vector<std::int64_t> frame_seqs;
  /// Frame arrival rate seen by the client.
  double frame_hz = 0.0;
};

/// Maps each frame to a wheel angle.
using Driver = std::function<double(const wire::WireFrame&)>;

/// Plays one session against a server and returns what it saw.
inline ClientResult run_client(const std::string& host, unsigned short port, const Driver& driver,
                               const ClientOptions& opt = {}) {
  using clock = std::chrono::steady_clock;
  net::io_context ioc;
  tcp::resolver resolver(ioc);
  websocket::stream<tcp::socket> ws(ioc);
  const auto results = resolver.resolve(host, std::to_string(port));
  net::connect(ws.next_layer(), results.begin(), results.end());
  ws.next_layer().set_option(tcp::no_delay(true));
  ws.set_option(websocket::stream_base::decorator([](websocket::request_type& req) {
    req.set(beast::http::field::user_agent, "wheelcon-client");
  }));
  ws.handshake(host + ":" + std::to_string(port), "/");
  ws.text(true);

  ClientResult out;
  beast::flat_buffer buf;
  auto read_json = [&]() -> std::optional<wire::json> {
    beast::error_code ec;
    ws.read(buf, ec);
    if (ec) return std::nullopt;
    auto j = wire::parse(beast::buffers_to_string(buf.data()));
    buf.consume(buf.size());
    return j;
  };

  auto first = read_json();
  if (!first || wire::kind_of(*first) != "hello") throw std::runtime_error("client: no server hello");
  out.hello = wire::decode_hello(*first);
  wire::Hello mine;
  mine.role = "subject";
  mine.proto_version = opt.proto_version;
  ws.write(net::buffer(wire::encode(mine)));

  clock::time_point first_frame{}, last_frame{};
  std::int64_t seq = 1;
  while (auto j = read_json()) {
    const auto kind = wire::kind_of(*j);
    if (kind == "config") {
      out.config = wire::decode_config(*j);
    } else if (kind == "event") {
      out.events.push_back(wire::decode_event(*j));
    } else if (kind == "summary") {
      out.summary = wire::decode_summary(*j);
    } else if (kind == "error") {
      out.error = wire::decode_error(*j);
    } else if (kind == "frame") {
      const auto f = wire::decode_frame(*j);
      const auto now = clock::now();
      if (out.frames == 0) first_frame = now;
      last_frame = now;
      ++out.frames;
      out.frame_seqs.push_back(f.seq);
      if (opt.disconnect_after && out.frames >= *opt.disconnect_after) {
        beast::error_code ec;
        ws.next_layer().shutdown(tcp::socket::shutdown_both, ec);
        ws.next_layer().close(ec);
        return out;
      }
      wire::WireInput in;
      in.seq = seq++;
      in.seq_ack = f.seq;
      in.angle = driver(f);
      in.timestamp =
          std::chrono::duration<double, std::milli>(now.time_since_epoch()).count();
      beast::error_code ec;
      ws.write(net::buffer(wire::encode(in)), ec);
      if (ec) break;
    }
  }
  if (out.frames > 1) {
    out.frame_hz = static_cast<double>(out.frames - 1) /
                   std::chrono::duration<double>(last_frame - first_frame).count();
  }
  return out;
}

}  // namespace wheelcon::service
