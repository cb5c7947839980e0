// Command-line front end: validate rosters, run scripted sessions headless,
// replay logs, benchmark the pipelines and serve the HTTP API.

#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>

#include "slotsim/benchmark.hpp"
#include "slotsim/json_io.hpp"
#include "slotsim/server.hpp"
#include "slotsim/session_log.hpp"

namespace {

using namespace slotsim;
using nlohmann::json;

std::vector<TeacherEvent> load_script(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open script '" + path + "'");
  std::vector<TeacherEvent> events;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    try {
      events.push_back(json_io::event_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Malformed, path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return events;
}

std::string render(const TranscriptEntry& e) {
  std::string out = "[" + std::to_string(e.turn) + "] " + e.speaker + ": ";
  out += e.text;
  if (e.stage_direction) out += (e.text.empty() ? "" : " ") + *e.stage_direction;
  if (e.instruction) out += "  " + serialize_instruction(*e.instruction);
  return out;
}

httplib::Server* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic classroom student simulator"};
  app.require_subcommand(1);

  std::string roster_path;
  auto* validate = app.add_subcommand("validate", "Validate a roster file");
  validate->add_option("roster", roster_path, "Roster JSON")->required();

  std::string script_path, config_path, log_path;
  std::uint64_t seed = 42;
  int stage = 1;
  bool json_out = false;
  auto* run = app.add_subcommand("run", "Run an event script headless and print the transcript");
  run->add_option("roster", roster_path, "Roster JSON")->required();
  run->add_option("--script", script_path, "Event script (one JSON event per line)")->required();
  run->add_option("--seed", seed, "Session RNG seed");
  run->add_option("--stage", stage, "Realism stage (1-3)")->check(CLI::Range(1, 3));
  run->add_option("--config", config_path, "Session config JSON");
  run->add_option("--log", log_path, "Write the session log here");
  run->add_flag("--json", json_out, "Print transcript records as JSON lines");

  BenchmarkConfig bench_cfg;
  auto* bench = app.add_subcommand("bench", "Compare single-call and multi-stage pipelines");
  bench->add_option("--latency", bench_cfg.latency_ms, "Simulated per-call latency (ms)");
  bench->add_option("--stages", bench_cfg.stages, "Refinement stages k");
  bench->add_option("--beam", bench_cfg.beam, "Candidates per stage b");
  bench->add_option("--turns", bench_cfg.turns, "Turns T");

  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "Replay a session log and verify the transcript");
  replay->add_option("log", replay_path, "Session log (NDJSON)")->required();

  int port = 8080;
  std::string host = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "Serve the HTTP/JSON API");
  serve->add_option("--port", port, "Port");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--config", config_path, "Default session config JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      try {
        const auto roster = load_roster(roster_path);
        std::cout << "ok: roster '" << roster.roster_id << "' with " << roster.students.size() << " student(s)\n";
        return 0;
      } catch (const Error& e) {
        if (!e.report()) throw;
        std::cout << json_io::report_to_json(*e.report()).dump(2) << "\n";
        return 1;
      }
    }

    if (*run) {
      SessionConfig cfg;
      cfg.roster_path = roster_path;
      cfg.seed = seed;
      cfg.stage = static_cast<RealismStage>(stage);
      if (!config_path.empty()) cfg.simulation = load_config(config_path);
      cfg.simulation.performer = apply_performer_env(cfg.simulation.performer);
      Session session(std::move(cfg));
      for (auto& event : load_script(script_path)) session.submit(std::move(event));
      const auto& state = session.state();
      if (json_out) {
        for (const auto& line : transcript_lines(state)) std::cout << line << "\n";
      } else {
        for (const auto& e : state.transcript) std::cout << render(e) << "\n";
        std::cerr << "turns: " << state.turn() << ", spin-path median " << state.metrics.spin_path_median_ms()
                  << " ms, p95 " << state.metrics.spin_path_p95_ms() << " ms\n";
      }
      if (!log_path.empty()) save_session_log(session, log_path);
      return 0;
    }

    if (*bench) {
      std::cout << benchmark_report_json(run_benchmark(bench_cfg)).dump(2) << "\n";
      return 0;
    }

    if (*replay) {
      const auto result = replay_session_log(replay_path);
      for (const auto& line : result.transcript) std::cout << line << "\n";
      if (!result.identical) {
        std::cerr << "replay diverged: " << result.mismatch << "\n";
        return 2;
      }
      std::cerr << "replay identical (" << result.turns << " turns)\n";
      return 0;
    }

    if (*serve) {
      SimulationConfig base;
      if (!config_path.empty()) base = load_config(config_path);
      base.performer = apply_performer_env(base.performer);
      SessionService service(base);
      httplib::Server server;
      register_routes(server, service);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on http://" << host << ":" << port << "\n";
      if (!server.listen(host, port)) {
        std::cerr << "cannot bind " << host << ":" << port << "\n";
        return 1;
      }
      service.stop();
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
