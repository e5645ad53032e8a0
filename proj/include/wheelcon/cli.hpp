#pragma once

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wheelcon/analysis.hpp"
#include "wheelcon/engine.hpp"
#include "wheelcon/log_io.hpp"
#include "wheelcon/script.hpp"
#include "wheelcon/service.hpp"
#include "wheelcon/subjects.hpp"
#include "wheelcon/verify.hpp"

namespace wheelcon::cli {

inline ParameterSchedule load_script(const std::string& path) {
  return parse_script(read_text_file(path));
}

/// The schedule a log was recorded against: the given script, or the
/// built-in game named in the header.
inline ParameterSchedule schedule_for_log(const SessionLog& log,
                                          const std::optional<std::string>& script) {
  if (script) return load_script(*script);
  const auto game = log.header.get_or("game", "");
  GameId id;
  try {
    id = parse_game_id(game);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("log does not name a built-in game; pass --script");
  }
  return build_game(id, std::stoull(log.header.get_or("seed", "0")));
}

inline void print_delay(std::ostream& out, const std::vector<DelayRow>& rows) {
  out << "T_ticks,placement,sup_x_const,sup_x_square,sup_u,telescoped,result\n";
  for (const auto& r : rows) {
    out << r.delay << ',' << to_string(r.placement) << ',' << format_exact(r.sup_x_constant) << ','
        << format_exact(r.sup_x_square) << ',' << format_exact(r.sup_u) << ','
        << (r.matches_telescoped ? "match" : "differ") << ',' << (r.pass ? "PASS" : "FAIL")
        << '\n';
  }
}

inline void print_rate(std::ostream& out, const std::vector<RateRow>& rows) {
  out << "R,scale,value,bound,sup_u,effort_formula,states,result\n";
  for (const auto& r : rows) {
    out << r.bits << ',' << format_number(r.scale) << ',' << format_number(r.value) << ','
        << format_exact(r.bound) << ',' << format_number(r.sup_u) << ','
        << format_exact(r.effort_bound) << ',' << r.states << ',' << (r.pass ? "PASS" : "FAIL")
        << '\n';
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Tracking-game engine with delay, quantization and disturbance"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "Write a game script");
  std::string game;
  std::uint64_t seed = 0;
  std::string gen_out;
  gen->add_option("--game", game, "1, 2, 3, 4, 5 or fitts")->required();
  gen->add_option("--seed", seed, "PRNG seed");
  gen->add_option("--out", gen_out, "Output script (stdout if omitted)");

  auto* run_cmd = app.add_subcommand("run", "Run a script headless with a synthetic subject");
  std::string script;
  std::string subject = "noisy-human";
  std::string run_out;
  std::optional<double> sensitivity, max_angle, bump_gain;
  run_cmd->add_option("--script", script, "Script file")->required();
  run_cmd->add_option("--subject", subject, "kind:key=value,... e.g. delayed-inverter:T=0.3");
  run_cmd->add_option("--out", run_out, "Log file (t,x,u)")->required();
  run_cmd->add_option("--sensitivity", sensitivity, "Wheel sensitivity k");
  run_cmd->add_option("--max-angle", max_angle, "Wheel angle limit, degrees");
  run_cmd->add_option("--bump-gain", bump_gain, "Bump gain g_w");

  auto* verify = app.add_subcommand("verify", "Check the delay law, the rate bound or the trends");
  verify->require_subcommand(1);
  auto* vdelay = verify->add_subcommand("delay", "Delayed inverter against worst-case r");
  std::int64_t max_T = 10;
  std::size_t delay_seeds = 10;
  vdelay->add_option("--max-T", max_T, "Largest delay in ticks")->check(CLI::Range(0, 100));
  vdelay->add_option("--seeds", delay_seeds, "Square-wave seeds");
  auto* vrate = verify->add_subcommand("rate", "Minimax oracle against the rate bound");
  std::vector<int> rate_bits{1, 2};
  int horizon = 6;
  vrate->add_option("--R", rate_bits, "Bits per tick")->delimiter(',');
  vrate->add_option("--horizon", horizon, "Game length in ticks");
  auto* vtrends = verify->add_subcommand("trends", "Noisy-human sweeps over games 1-5");
  std::size_t trend_seeds = 20;
  vtrends->add_option("--seeds", trend_seeds, "Seeds 1..N");

  auto* serve = app.add_subcommand("serve", "Host live sessions over a websocket");
  unsigned short port = 8765;
  std::string address = "127.0.0.1";
  std::string serve_script;
  std::string serve_out;
  std::size_t sessions = 1;
  bool lockstep = false;
  serve->add_option("--port", port, "TCP port (0 picks a free one)");
  serve->add_option("--address", address, "Bind address");
  serve->add_option("--script", serve_script, "Script file")->required();
  serve->add_option("--out", serve_out, "Log file for the first session");
  serve->add_option("--sessions", sessions, "Exit after this many sessions (0: run forever)");
  serve->add_flag("--lockstep", lockstep, "Wait for each frame's input instead of pacing");

  auto* replay_cmd = app.add_subcommand("replay", "Re-run a log's input trace and compare");
  std::string log_path;
  std::optional<std::string> replay_script;
  replay_cmd->add_option("--log", log_path, "Log file")->required();
  replay_cmd->add_option("--script", replay_script, "Script (default: rebuild from the header)");

  auto* analyze = app.add_subcommand("analyze", "Per-block error norms of a log");
  std::string analyze_log;
  std::optional<std::string> analyze_script;
  double trim = 5.0;
  std::string analyze_out;
  analyze->add_option("log", analyze_log, "Log file")->required();
  analyze->add_option("--script", analyze_script, "Script (default: rebuild from the header)");
  analyze->add_option("--trim", trim, "Seconds dropped at each block edge");
  analyze->add_option("--out", analyze_out, "Report file (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*gen) {
      const auto sched = build_game(parse_game_id(game), seed);
      const auto text = write_script(sched);
      if (gen_out.empty()) out << text;
      else write_text_file(gen_out, text);
      return 0;
    }
    if (*run_cmd) {
      SessionConfig cfg = SessionConfig::for_schedule(load_script(script));
      if (sensitivity) cfg.sensitivity = *sensitivity;
      if (max_angle) cfg.max_angle = *max_angle;
      if (bump_gain) cfg.bump_gain = *bump_gain;
      cfg.check();
      auto subj = make_subject(parse_subject_spec(subject), cfg);
      const auto log = run_headless(cfg, *subj);
      write_log(log, run_out);
      out << "wrote " << run_out << ": " << log.records.size() << " ticks, "
          << log.header.get_or("status", "complete") << '\n';
      return log.aborted() ? 1 : 0;
    }
    if (*vdelay) {
      DelayOptions opt;
      opt.max_delay = max_T;
      opt.seeds.clear();
      for (std::uint64_t s = 1; s <= delay_seeds; ++s) opt.seeds.push_back(s);
      const auto rows = verify_delay(opt);
      print_delay(out, rows);
      for (const auto& r : rows) {
        if (!r.pass) return 1;
      }
      return 0;
    }
    if (*vrate) {
      RateOptions opt;
      opt.bits = rate_bits;
      opt.horizon = horizon;
      const auto rows = verify_rate(opt);
      print_rate(out, rows);
      for (const auto& r : rows) {
        if (!r.pass) return 1;
      }
      return 0;
    }
    if (*vtrends) {
      SweepOptions opt;
      opt.seeds.clear();
      for (std::uint64_t s = 1; s <= trend_seeds; ++s) opt.seeds.push_back(s);
      bool ok = true;
      for (auto id : {GameId::kGame1, GameId::kGame2, GameId::kGame3, GameId::kGame4,
                      GameId::kGame5}) {
        const auto rows = sweep_norms(id, opt);
        out << "# game " << to_string(id) << "\nparam,L1,L2,Linf\n";
        for (const auto& r : rows) {
          out << r.param << ',' << format_number(r.mean.l1) << ',' << format_number(r.mean.l2)
              << ',' << format_number(r.mean.linf) << '\n';
        }
        if (id == GameId::kGame1 || id == GameId::kGame2) {
          const double rho = delay_trend(rows);
          const bool pass = rho >= 0.9;
          ok = ok && pass;
          out << "spearman_linf=" << format_number(rho) << ' ' << (pass ? "PASS" : "FAIL") << '\n';
        } else if (id == GameId::kGame3 || id == GameId::kGame4) {
          bool pass = true;
          for (auto f : {&Norms::l1, &Norms::l2, &Norms::linf}) {
            pass = pass && rate_trend(column(rows, f), 4);
          }
          ok = ok && pass;
          out << "rate_trend " << (pass ? "PASS" : "FAIL") << '\n';
        } else {
          bool pass = rows.size() == 3;
          for (auto f : {&Norms::l1, &Norms::l2, &Norms::linf}) {
            const auto c = column(rows, f);
            pass = pass && c[2] >= c[0] && c[2] >= c[1];
          }
          ok = ok && pass;
          out << "combined_vs_isolated " << (pass ? "PASS" : "FAIL") << '\n';
        }
      }
      return ok ? 0 : 1;
    }
    if (*serve) {
      SessionConfig cfg = SessionConfig::for_schedule(load_script(serve_script));
      service::ServerOptions opt;
      opt.address = address;
      opt.port = port;
      opt.log_path = serve_out;
      opt.max_sessions = sessions;
      opt.pacing = lockstep ? service::Pacing::kLockstep : service::Pacing::kRealtime;
      service::Server server(std::move(cfg), opt);
      out << "listening on ws://" << address << ':' << server.port() << '\n' << std::flush;
      server.run();
      for (const auto& r : server.results()) {
        out << "session " << r.summary.status << ": " << r.log.records.size() << " ticks, "
            << format_number(r.summary.measured_hz) << " Hz, late_input="
            << r.summary.diagnostics.late_input << '\n';
      }
      return 0;
    }
    if (*replay_cmd) {
      const auto log = read_log(log_path);
      const auto cfg = config_from_header(log.header, schedule_for_log(log, replay_script));
      const auto again = replay(log, cfg);
      if (again.records != log.records) {
        std::size_t i = 0;
        while (i < again.records.size() && i < log.records.size() &&
               again.records[i] == log.records[i]) {
          ++i;
        }
        err << "replay differs from the log at record " << i << '\n';
        return 1;
      }
      out << "replay identical: " << again.records.size() << " records\n";
      return 0;
    }
    if (*analyze) {
      const auto log = read_log(analyze_log);
      const auto sched = schedule_for_log(log, analyze_script);
      std::string text;
      if (auto fitts = fitts_from_schedule(sched)) {
        const auto s = summarize(movement_times(log, *fitts));
        text += "# fitts mean_mt=" + format_number(s.mean_mt) +
                " completed=" + std::to_string(s.completed) +
                " censoring_rate=" + format_number(s.censoring_rate) + "\n";
      }
      text += report_text(block_norms(log, sched, trim));
      if (analyze_out.empty()) out << text;
      else write_text_file(analyze_out, text);
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace wheelcon::cli
