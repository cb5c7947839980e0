#include <doctest.h>

#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "slotsim/server.hpp"

using namespace slotsim;
using nlohmann::json;

namespace {

struct LiveServer {
  SessionService service;
  httplib::Server server;
  std::thread thread;
  int port = 0;

  LiveServer() {
    register_routes(server, service);
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~LiveServer() {
    service.stop();
    server.stop();
    thread.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(5, 0);
    return c;
  }
};

json post(httplib::Client& c, const std::string& path, const json& body, int expected) {
  const auto res = c.Post(path, body.dump(), "application/json");
  REQUIRE(res);
  CHECK_MESSAGE(res->status == expected, res->body);
  return json::parse(res->body);
}

json create_demo(httplib::Client& c, int seed = 6) {
  return post(c, "/sessions", {{"roster_path", fixtures::data_path("demo_roster.json")}, {"stage", 1}, {"seed", seed}},
              201);
}

}  // namespace

TEST_CASE("session lifecycle over HTTP") {
  LiveServer live;
  auto c = live.client();
  const auto created = create_demo(c);
  const std::string id = created["session_id"];
  CHECK(created["stage"] == "stage1");
  CHECK(created["turn"] == 0);
  CHECK(created["exaggeration_factor"] == 2.0);
  CHECK(created["students"].size() == 3);

  const auto reply = post(c, "/sessions/" + id + "/events",
                          {{"kind", "ask_question"},
                           {"target", "devin"},
                           {"topic_tags", {"4x", "multiplication", "tables"}},
                           {"text", "Devin, what is 4 times 3? Think of it like collecting Fortnite loot."}},
                          200);
  REQUIRE(reply["responses"].size() == 1);
  CHECK(reply["responses"][0]["utterance"]["text"] == "It's 12! I got this!");
  CHECK(reply["responses"][0]["instruction"]["serialized"] ==
        "[Action: Answer Correctly; Confidence: 85%; Emotion: Joy; Tone: Eager; "
        "Contextual_Note: Use fortnite analogy if applicable]");
  CHECK(reply["turn"] == 1);

  const auto snap = c.Get("/sessions/" + id);
  REQUIRE(snap);
  CHECK(snap->status == 200);
  const auto s = json::parse(snap->body);
  CHECK(s["turn"] == 1);
  CHECK(s["transcript"].size() == 2);
}

TEST_CASE("HTTP error mapping") {
  LiveServer live;
  auto c = live.client();
  const std::string id = create_demo(c)["session_id"];

  auto e = post(c, "/sessions/nope/events", {{"kind", "wait"}}, 404);
  CHECK(e["error"] == "UNKNOWN_SESSION");
  const auto missing = c.Get("/sessions/nope");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  e = post(c, "/sessions/" + id + "/events", {{"kind", "compliment"}, {"target", "ghost"}}, 422);
  CHECK(e["error"] == "UNKNOWN_TARGET");
  e = post(c, "/sessions/" + id + "/events", {{"kind", "dance"}}, 400);
  CHECK(e["error"] == "MALFORMED");
  e = post(c, "/sessions/" + id + "/events", {{"kind", "compliment"}}, 400);
  CHECK(e["error"] == "MALFORMED");

  const auto bad_json = c.Post("/sessions/" + id + "/events", "{not json", "application/json");
  REQUIRE(bad_json);
  CHECK(bad_json->status == 400);

  e = post(c, "/sessions", {{"roster_path", "/nonexistent.json"}}, 400);
  CHECK(e["error"] == "IO");
  auto roster = json::parse(fixtures::roster_text());
  roster["students"][1]["student_id"] = "devin";
  e = post(c, "/sessions", {{"roster", roster}}, 422);
  CHECK(e["error"] == "VALIDATION");
  CHECK(e["report"]["issues"].size() >= 1);
  e = post(c, "/sessions", {{"roster_path", fixtures::data_path("demo_roster.json")}, {"stage", 7}}, 400);
  CHECK(e["error"] == "INVALID_ARGUMENT");

  const auto bad_since = c.Get("/sessions/" + id + "/stream?since=abc");
  REQUIRE(bad_since);
  CHECK(bad_since->status == 400);
}

TEST_CASE("benchmark endpoint") {
  LiveServer live;
  auto c = live.client();
  const auto r = post(c, "/benchmarks", {{"latency_ms", 0}, {"stages", 2}, {"beam", 3}, {"turns", 4}}, 200);
  CHECK(r["single_call"]["total_calls"] == 4);
  CHECK(r["multi_stage"]["total_calls"] == 24);
  const auto bad = post(c, "/benchmarks", {{"stages", 0}}, 400);
  CHECK(bad["error"] == "INVALID_ARGUMENT");
}

TEST_CASE("event stream delivers updates within a second") {
  LiveServer live;
  auto c = live.client();
  const std::string id = create_demo(c)["session_id"];

  std::string received;
  std::mutex mu;
  std::atomic<bool> done{false};
  std::thread reader([&] {
    auto sc = live.client();
    sc.Get("/sessions/" + id + "/stream?since=0", [&](const char* data, std::size_t n) {
      std::lock_guard lock(mu);
      received.append(data, n);
      return !done.load();
    });
  });

  auto wait_for = [&](const std::string& needle, std::chrono::milliseconds budget) {
    const auto deadline = std::chrono::steady_clock::now() + budget;
    while (std::chrono::steady_clock::now() < deadline) {
      {
        std::lock_guard lock(mu);
        if (received.find(needle) != std::string::npos) return true;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    return false;
  };

  CHECK(wait_for("id: 0\nevent: affect\n", std::chrono::seconds(2)));
  const auto sent = std::chrono::steady_clock::now();
  post(c, "/sessions/" + id + "/events", {{"kind", "compliment"}, {"target", "devin"}}, 200);
  CHECK(wait_for("[compliments devin]", std::chrono::seconds(1)));
  CHECK(wait_for("\"pride_accomplishment\":0.5428", std::chrono::seconds(1)));
  CHECK(std::chrono::steady_clock::now() - sent < std::chrono::seconds(1));

  done = true;
  post(c, "/sessions/" + id + "/events", {{"kind", "wait"}}, 200);
  reader.join();
  std::lock_guard lock(mu);
  CHECK(received.find("id: 1\nevent: transcript\n") != std::string::npos);
}

TEST_CASE("stream resumes after Last-Event-ID") {
  LiveServer live;
  auto c = live.client();
  const std::string id = create_demo(c)["session_id"];
  post(c, "/sessions/" + id + "/events", {{"kind", "wait"}}, 200);  // notifications 1, 2
  post(c, "/sessions/" + id + "/events", {{"kind", "wait"}}, 200);  // notifications 3, 4

  std::string received;
  auto sc = live.client();
  sc.Get("/sessions/" + id + "/stream", {{"Last-Event-ID", "2"}}, [&](const char* data, std::size_t n) {
    received.append(data, n);
    return received.find("id: 4\n") == std::string::npos;
  });
  CHECK(received.rfind("id: 3\n", 0) == 0);
  CHECK(received.find("id: 2\n") == std::string::npos);
}

TEST_CASE("status mapping") {
  CHECK(http_status_for(ErrorCode::UnknownSession) == 404);
  CHECK(http_status_for(ErrorCode::EmptyContext) == 422);
  CHECK(http_status_for(ErrorCode::Timeout) == 504);
  CHECK(http_status_for(ErrorCode::BackendUnreachable) == 502);
  CHECK(http_status_for(ErrorCode::SchemaMismatch) == 400);
}
