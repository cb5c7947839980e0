#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "slotsim/config.hpp"
#include "slotsim/events.hpp"
#include "slotsim/modifiers.hpp"
#include "slotsim/performer.hpp"
#include "slotsim/retrieval.hpp"
#include "slotsim/spin.hpp"
#include "slotsim/stage.hpp"

namespace slotsim {

struct SessionConfig {
  std::optional<std::filesystem::path> roster_path;
  std::optional<Roster> roster;  // used when roster_path is empty
  RealismStage stage = RealismStage::Stage1;
  std::uint64_t seed = 0;
  SimulationConfig simulation;
  std::shared_ptr<Performer> performer;  // built from simulation.performer when null
  std::string session_id = "session";
  int sessions_completed_at_stage = 0;
};

struct EventRecord {
  int turn = 0;
  TeacherEvent event;
  std::vector<std::string> instance_ids;
};

struct SpinRecord {
  int turn = 0;
  StudentId student_id;
  std::uint64_t seed = 0;
  SpinOutcome outcome;
};

// Per-session trainee metrics plus the spin-path latency samples.
struct MetricsAccumulator {
  int turns = 0;
  int constructive_turns = 0;
  int disruptions = 0;
  int disruptions_resolved = 0;
  std::vector<double> response_latency_ms;
  std::vector<double> spin_path_ms;
  std::vector<double> performer_ms;

  struct Pending {
    StudentId student_id;
    int turn = 0;
  };
  std::vector<Pending> open_disruptions;

  [[nodiscard]] TraineeMetrics snapshot(int sessions_completed) const;
  [[nodiscard]] double spin_path_median_ms() const;
  [[nodiscard]] double spin_path_p95_ms() const;
};

struct SessionState {
  std::string session_id;
  Roster source_roster;  // as loaded, before stage clamping
  std::vector<StudentId> inactive_students;
  ClassroomState classroom;  // profiles clamped to the stage
  RealismStage stage = RealismStage::Stage1;
  StageCaps caps;
  std::vector<TranscriptEntry> transcript;
  std::vector<EventRecord> events;
  std::vector<SpinRecord> spins;
  MetricsAccumulator metrics;
  std::uint64_t rng_seed = 0;
  int sessions_completed_at_stage = 0;

  [[nodiscard]] int turn() const { return classroom.turn; }
};

struct StudentResponse {
  StudentId student_id;
  Utterance utterance;
  BehavioralInstruction instruction;
};

// Ground-truth answer text carried by a knowledge node: the text after the
// last '=' of its description ("4 x 3 = 12" gives "12"), else the whole description.
std::string answer_from_description(const KnowledgeNode& node);

// A single classroom session. Not thread-safe: callers serialize access.
class Session {
public:
  // Loads and clamps the roster; throws IO/SCHEMA_MISMATCH/VALIDATION.
  explicit Session(SessionConfig config);

  // event -> modifiers -> peer influence -> spin -> perform -> log -> decay.
  // Throws UNKNOWN_TARGET or MALFORMED before touching any state.
  std::vector<StudentResponse> submit(TeacherEvent event);

  [[nodiscard]] const SessionState& state() const { return state_; }
  [[nodiscard]] const SimulationConfig& config() const { return config_; }
  [[nodiscard]] std::string_view performer_backend() const { return performer_->backend_id(); }

private:
  StudentResponse respond(const StudentSlot& slot, const SpinOutcome& outcome, const KnowledgeNode* node,
                          std::uint64_t spin_seed);
  void update_metrics(const TeacherEvent& event, const std::vector<StudentResponse>& responses);

  SimulationConfig config_;
  std::shared_ptr<Performer> performer_;
  SessionState state_;
  std::optional<std::chrono::steady_clock::time_point> last_response_at_;
};

Session create_session(SessionConfig config);
std::vector<StudentResponse> submit_teacher_event(Session& session, TeacherEvent event);

nlohmann::json transcript_entry_to_json(const TranscriptEntry& e);
nlohmann::json trace_to_json(const SpinTrace& t);
nlohmann::json response_to_json(const StudentResponse& r);
// Snapshot served by GET /sessions/{id}.
nlohmann::json session_snapshot_json(const SessionState& s, double exaggeration_factor);
nlohmann::json affect_update_json(const SessionState& s);

}  // namespace slotsim
