#pragma once

#include <atomic>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "slotsim/session.hpp"

namespace httplib {
class Server;
}

namespace slotsim {

// Owns live sessions. Each session has its own lock, so events for one
// session are serialized while different sessions proceed in parallel.
class SessionService {
public:
  explicit SessionService(SimulationConfig base_config = {});

  // Body keys: roster_path | roster, stage, seed, backend, config.
  nlohmann::json create(const nlohmann::json& body);
  nlohmann::json submit(const std::string& session_id, const nlohmann::json& event_body);
  nlohmann::json snapshot(const std::string& session_id) const;

  // Blocks up to `wait` for notifications with index >= from; returns them
  // with their indices. Returns early when the service is stopping.
  std::vector<std::pair<std::size_t, std::string>> notifications_since(const std::string& session_id,
                                                                        std::size_t from,
                                                                        std::chrono::milliseconds wait) const;
  [[nodiscard]] std::size_t notification_count(const std::string& session_id) const;

  void stop();
  [[nodiscard]] bool stopping() const { return stopping_.load(); }

private:
  struct Entry {
    explicit Entry(Session s) : session(std::move(s)) {}
    mutable std::mutex mu;
    mutable std::condition_variable cv;
    Session session;
    std::vector<std::string> notifications;  // append-only
  };

  std::shared_ptr<Entry> find(const std::string& session_id) const;

  SimulationConfig base_config_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  int next_id_ = 1;
  std::atomic<bool> stopping_{false};
};

int http_status_for(ErrorCode code);

// Registers POST /sessions, POST /sessions/{id}/events, GET /sessions/{id},
// GET /sessions/{id}/stream (text/event-stream) and POST /benchmarks.
void register_routes(httplib::Server& server, SessionService& service);

}  // namespace slotsim
