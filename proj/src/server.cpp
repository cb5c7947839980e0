#include "slotsim/server.hpp"

#include <charconv>

#include <httplib.h>

#include "slotsim/benchmark.hpp"
#include "slotsim/json_io.hpp"

namespace slotsim {
namespace {

using nlohmann::json;

json error_body(const Error& e) {
  json j = {{"error", to_string(e.code())}, {"message", e.what()}};
  if (e.report()) j["report"] = json_io::report_to_json(*e.report());
  return j;
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename F>
void guarded(httplib::Response& res, F&& handler) {
  try {
    handler();
  } catch (const Error& e) {
    reply(res, http_status_for(e.code()), error_body(e));
  } catch (const json::exception& e) {
    reply(res, 400, {{"error", "MALFORMED"}, {"message", e.what()}});
  }
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Malformed, std::string("request body is not JSON: ") + e.what());
  }
}

std::size_t parse_index(const std::string& text, std::string_view what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw Error(ErrorCode::Malformed, std::string(what) + " must be a non-negative integer");
  return v;
}

RealismStage parse_stage(const json& v) {
  if (v.is_number_integer()) {
    const int n = v.get<int>();
    if (n >= 1 && n <= 3) return static_cast<RealismStage>(n);
  } else if (v.is_string()) {
    if (auto s = stage_from_key(v.get<std::string>())) return *s;
  }
  throw Error(ErrorCode::InvalidArgument, "stage must be 1-3 or 'stage1'..'stage3'");
}

}  // namespace

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownSession: return 404;
    case ErrorCode::UnknownTarget:
    case ErrorCode::Validation:
    case ErrorCode::EmptyContext: return 422;
    case ErrorCode::BackendUnreachable:
    case ErrorCode::BadResponse: return 502;
    case ErrorCode::Timeout: return 504;
    default: return 400;
  }
}

SessionService::SessionService(SimulationConfig base_config) : base_config_(std::move(base_config)) {}

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "no session '" + session_id + "'");
  return it->second;
}

json SessionService::create(const json& body) {
  json_io::require_keys_within(body, {"roster_path", "roster", "stage", "seed", "backend", "config"}, "session request",
                               ErrorCode::Malformed);
  SessionConfig cfg;
  cfg.simulation = body.contains("config") ? config_from_json(body.at("config")) : base_config_;
  if (body.contains("roster_path")) cfg.roster_path = body.at("roster_path").get<std::string>();
  else if (body.contains("roster")) cfg.roster = json_io::roster_from_json(body.at("roster"));
  else throw Error(ErrorCode::Malformed, "session request needs 'roster_path' or 'roster'");
  if (body.contains("stage")) cfg.stage = parse_stage(body.at("stage"));
  if (body.contains("seed")) cfg.seed = body.at("seed").get<std::uint64_t>();
  if (body.contains("backend")) {
    const auto b = body.at("backend").get<std::string>();
    if (b == "template") cfg.simulation.performer.backend = PerformerBackend::Template;
    else if (b == "external") cfg.simulation.performer.backend = PerformerBackend::External;
    else throw Error(ErrorCode::InvalidArgument, "backend must be 'template' or 'external'");
  }

  std::string id;
  {
    std::lock_guard lock(mu_);
    id = "s" + std::to_string(next_id_++);
  }
  cfg.session_id = id;
  auto entry = std::make_shared<Entry>(Session(std::move(cfg)));
  json snap;
  {
    std::lock_guard lock(entry->mu);
    entry->notifications.push_back(affect_update_json(entry->session.state()).dump());
    snap = session_snapshot_json(entry->session.state(), entry->session.state().caps.exaggeration_factor);
  }
  std::lock_guard lock(mu_);
  sessions_.emplace(id, std::move(entry));
  return snap;
}

json SessionService::submit(const std::string& session_id, const json& event_body) {
  const auto entry = find(session_id);
  const auto event = json_io::event_from_json(event_body);
  std::lock_guard lock(entry->mu);
  const auto before = entry->session.state().transcript.size();
  const auto responses = entry->session.submit(event);
  const auto& state = entry->session.state();
  for (auto i = before; i < state.transcript.size(); ++i)
    entry->notifications.push_back(
        json{{"type", "transcript"}, {"entry", transcript_entry_to_json(state.transcript[i])}}.dump());
  entry->notifications.push_back(affect_update_json(state).dump());
  entry->cv.notify_all();

  json out = {{"session_id", session_id}, {"turn", state.turn()}, {"responses", json::array()}};
  for (const auto& r : responses) out["responses"].push_back(response_to_json(r));
  return out;
}

json SessionService::snapshot(const std::string& session_id) const {
  const auto entry = find(session_id);
  std::lock_guard lock(entry->mu);
  return session_snapshot_json(entry->session.state(), entry->session.state().caps.exaggeration_factor);
}

std::size_t SessionService::notification_count(const std::string& session_id) const {
  const auto entry = find(session_id);
  std::lock_guard lock(entry->mu);
  return entry->notifications.size();
}

std::vector<std::pair<std::size_t, std::string>> SessionService::notifications_since(
    const std::string& session_id, std::size_t from, std::chrono::milliseconds wait) const {
  const auto entry = find(session_id);
  std::unique_lock lock(entry->mu);
  entry->cv.wait_for(lock, wait, [&] { return stopping_.load() || entry->notifications.size() > from; });
  std::vector<std::pair<std::size_t, std::string>> out;
  for (auto i = from; i < entry->notifications.size(); ++i) out.emplace_back(i, entry->notifications[i]);
  return out;
}

void SessionService::stop() {
  stopping_ = true;
  std::lock_guard lock(mu_);
  for (auto& [id, entry] : sessions_) {
    std::lock_guard entry_lock(entry->mu);
    entry->cv.notify_all();
  }
}

void register_routes(httplib::Server& server, SessionService& service) {
  server.Post("/sessions", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { reply(res, 201, service.create(parse_body(req))); });
  });

  server.Post(R"(/sessions/([^/]+)/events)", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { reply(res, 200, service.submit(req.matches[1], parse_body(req))); });
  });

  server.Get(R"(/sessions/([^/]+))", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { reply(res, 200, service.snapshot(req.matches[1])); });
  });

  server.Get(R"(/sessions/([^/]+)/stream)", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = req.matches[1];
      std::size_t next = service.notification_count(id);  // new notifications only by default
      if (req.has_param("since")) next = parse_index(req.get_param_value("since"), "since");
      else if (req.has_header("Last-Event-ID")) next = parse_index(req.get_header_value("Last-Event-ID"), "Last-Event-ID") + 1;

      res.set_header("Cache-Control", "no-cache");
      res.set_chunked_content_provider(
          "text/event-stream", [&service, id, next, idle = 0](std::size_t, httplib::DataSink& sink) mutable {
            if (service.stopping() || !sink.is_writable()) return false;
            const auto batch = service.notifications_since(id, next, std::chrono::milliseconds(250));
            if (batch.empty()) {
              // Comment frame every ~10 s keeps proxies from closing an idle stream.
              static constexpr std::string_view kPing = ": ping\n\n";
              return ++idle % 40 != 0 || sink.write(kPing.data(), kPing.size());
            }
            idle = 0;
            for (const auto& [index, payload] : batch) {
              const auto type = json::parse(payload).value("type", "message");
              const std::string frame =
                  "id: " + std::to_string(index) + "\nevent: " + type + "\ndata: " + payload + "\n\n";
              if (!sink.write(frame.data(), frame.size())) return false;
              next = index + 1;
            }
            return true;
          });
    });
  });

  server.Post("/benchmarks", [](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = parse_body(req);
      json_io::require_keys_within(body, {"latency_ms", "stages", "beam", "turns", "seed"}, "benchmark request",
                                   ErrorCode::Malformed);
      BenchmarkConfig cfg;
      cfg.latency_ms = body.value("latency_ms", cfg.latency_ms);
      cfg.stages = body.value("stages", cfg.stages);
      cfg.beam = body.value("beam", cfg.beam);
      cfg.turns = body.value("turns", cfg.turns);
      cfg.seed = body.value("seed", cfg.seed);
      reply(res, 200, benchmark_report_json(run_benchmark(cfg)));
    });
  });
}

}  // namespace slotsim
