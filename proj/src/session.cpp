#include "slotsim/session.hpp"

#include <algorithm>
#include <chrono>
#include <cctype>

#include "slotsim/json_io.hpp"

namespace slotsim {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double ms_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (v[hi] - v[lo]) * (pos - static_cast<double>(lo));
}

bool is_constructive(const TeacherEvent& e) {
  return e.kind == TeacherEventKind::Compliment || e.kind == TeacherEventKind::AskQuestion;
}

// Events that count as addressing an open disruption by a given student.
bool addresses(const TeacherEvent& e, std::string_view student) {
  if (e.kind == TeacherEventKind::Instruction) return true;
  return e.target && *e.target == student;
}

bool resolves_disruption(const TeacherEvent& e) {
  switch (e.kind) {
    case TeacherEventKind::AskQuestion:
    case TeacherEventKind::Compliment:
    case TeacherEventKind::Instruction: return true;
    case TeacherEventKind::Proximity: return e.near;
    default: return false;
  }
}

constexpr int kDisruptionWindowTurns = 2;

std::string teacher_direction(const TeacherEvent& e) {
  const std::string who = e.target ? *e.target : "the class";
  switch (e.kind) {
    case TeacherEventKind::AskQuestion: return "[asks " + who + "]";
    case TeacherEventKind::Compliment: return "[compliments " + who + "]";
    case TeacherEventKind::HarshCritique: return "[criticizes " + who + "]";
    case TeacherEventKind::Instruction: return "[instructs the class]";
    case TeacherEventKind::Proximity: return e.near ? "[walks over to " + who + "]" : "[steps away from " + who + "]";
    case TeacherEventKind::Wait: return "[waits]";
  }
  return "";
}

Roster resolve_roster(const SessionConfig& config) {
  if (config.roster_path) return load_roster(*config.roster_path);
  if (!config.roster) throw Error(ErrorCode::InvalidArgument, "session needs a roster or roster_path");
  auto report = validate_roster(*config.roster);
  if (!report.ok) throw Error(ErrorCode::Validation, "roster failed validation", std::move(report));
  return *config.roster;
}

}  // namespace

TraineeMetrics MetricsAccumulator::snapshot(int sessions_completed) const {
  TraineeMetrics m;
  m.sessions_completed = sessions_completed;
  if (!response_latency_ms.empty()) {
    double sum = 0.0;
    for (const double v : response_latency_ms) sum += v;
    m.mean_response_latency_ms = sum / static_cast<double>(response_latency_ms.size());
  }
  m.constructive_fraction = turns == 0 ? 0.0 : static_cast<double>(constructive_turns) / turns;
  m.disruption_resolution_rate = disruptions == 0 ? 1.0 : static_cast<double>(disruptions_resolved) / disruptions;
  return m;
}

double MetricsAccumulator::spin_path_median_ms() const { return percentile(spin_path_ms, 0.5); }
double MetricsAccumulator::spin_path_p95_ms() const { return percentile(spin_path_ms, 0.95); }

std::string answer_from_description(const KnowledgeNode& node) {
  std::string_view d = node.description;
  if (const auto eq = d.rfind('='); eq != std::string_view::npos) d = d.substr(eq + 1);
  while (!d.empty() && std::isspace(static_cast<unsigned char>(d.front()))) d.remove_prefix(1);
  while (!d.empty() && std::isspace(static_cast<unsigned char>(d.back()))) d.remove_suffix(1);
  return d.empty() ? node.node_id : std::string(d);
}

Session::Session(SessionConfig config) : config_(std::move(config.simulation)) {
  performer_ = config.performer ? config.performer : make_performer(config_.performer);
  state_.session_id = config.session_id;
  state_.source_roster = resolve_roster(config);
  state_.stage = config.stage;
  state_.caps = config_.stage_caps[config.stage];
  state_.rng_seed = config.seed;
  state_.sessions_completed_at_stage = config.sessions_completed_at_stage;

  std::vector<StudentProfile> active;
  for (const auto& p : state_.source_roster.students) {
    if (static_cast<int>(active.size()) < state_.caps.max_roster_active)
      active.push_back(clamp_to_stage(p, state_.caps).profile);
    else
      state_.inactive_students.push_back(p.student_id);
  }
  state_.classroom = make_classroom(active);
}

StudentResponse Session::respond(const StudentSlot& slot, const SpinOutcome& outcome, const KnowledgeNode* node,
                                 std::uint64_t spin_seed) {
  state_.spins.push_back({state_.turn(), slot.profile.student_id, spin_seed, outcome});

  PerformerRequest req;
  req.instruction = outcome.instruction;
  req.persona_blurb = slot.profile.persona_blurb;
  const auto window = static_cast<std::size_t>(config_.session.transcript_window);
  const auto& t = state_.transcript;
  req.transcript.assign(t.end() - static_cast<std::ptrdiff_t>(std::min(window, t.size())), t.end());
  const auto action = outcome.instruction.action;
  if ((action == ActionKind::AnswerCorrectly || action == ActionKind::AnswerIncorrectly) && node)
    req.answer = answer_from_description(*node);

  StudentResponse r{slot.profile.student_id, {}, outcome.instruction};
  try {
    r.utterance = performer_->perform(req);
  } catch (const Error& e) {
    r.utterance.backend_id = std::string(performer_->backend_id());
    r.utterance.stage_direction = "[no response: " + std::string(to_string(e.code())) + "]";
  }
  state_.transcript.push_back(
      {state_.turn(), slot.profile.student_id, r.utterance.text, r.utterance.stage_direction, outcome.instruction});
  return r;
}

std::vector<StudentResponse> Session::submit(TeacherEvent event) {
  const auto received = Clock::now();
  check_event_shape(event);
  if (event.is_targeted() && !state_.classroom.find(*event.target))
    throw Error(ErrorCode::UnknownTarget, "no active student '" + *event.target + "' in session " + state_.session_id);
  if (event.kind == TeacherEventKind::AskQuestion) {
    // Fail before mutating anything if the question cannot be grounded in a node.
    try {
      (void)query_nodes(state_.classroom.find(*event.target)->profile, event.topic_tags, 1);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoFallback) throw;
      throw Error(ErrorCode::EmptyContext, e.what());
    }
  }
  event.turn = state_.turn();

  auto ids = apply_event(state_.classroom, event, config_.modifier_defaults);
  auto peer_ids = propagate_peer_influence(state_.classroom, config_.peer_influence);
  ids.insert(ids.end(), std::make_move_iterator(peer_ids.begin()), std::make_move_iterator(peer_ids.end()));
  state_.events.push_back({event.turn, event, std::move(ids)});
  state_.transcript.push_back({event.turn, "teacher", event.text, teacher_direction(event), std::nullopt});

  std::vector<StudentResponse> responses;
  double performer_ms = 0.0;
  auto perform_timed = [&](const StudentSlot& slot, const SpinOutcome& outcome, const KnowledgeNode* node,
                           std::uint64_t seed) {
    const auto t0 = Clock::now();
    responses.push_back(respond(slot, outcome, node, seed));
    performer_ms += ms_between(t0, Clock::now());
  };

  for (const auto& slot : state_.classroom.students) {
    const auto& id = slot.profile.student_id;
    const bool addressed = event.kind == TeacherEventKind::AskQuestion && *event.target == id;
    if (!addressed && !config_.session.unaddressed_wildcard) continue;
    const std::uint64_t seed = derive_spin_seed(state_.rng_seed, event.turn, id);
    SeededRandom rng(seed);
    SpinContext ctx{event.topic_tags, event.text, id, event.turn, state_.caps};
    if (addressed) {
      const auto outcome = spin(slot.profile, slot.instances, ctx, rng, config_.spin);
      perform_timed(slot, outcome, slot.profile.find_node(outcome.trace.node_id), seed);
    } else if (config_.session.unaddressed_wildcard) {
      if (const auto outcome = spin_unaddressed(slot.profile, slot.instances, ctx, rng, config_.spin))
        perform_timed(slot, *outcome, nullptr, seed);
    }
  }

  tick_decay(state_.classroom);
  state_.classroom.turn += 1;

  const auto done = Clock::now();
  state_.metrics.spin_path_ms.push_back(ms_between(received, done) - performer_ms);
  state_.metrics.performer_ms.push_back(performer_ms);
  update_metrics(event, responses);
  return responses;
}

void Session::update_metrics(const TeacherEvent& event, const std::vector<StudentResponse>& responses) {
  auto& m = state_.metrics;
  const auto now = Clock::now();
  m.turns += 1;
  if (is_constructive(event)) m.constructive_turns += 1;

  // Resolve or expire disruptions opened on earlier turns.
  std::erase_if(m.open_disruptions, [&](const MetricsAccumulator::Pending& p) {
    if (addresses(event, p.student_id)) {
      if (resolves_disruption(event)) m.disruptions_resolved += 1;
      return true;
    }
    return event.turn - p.turn >= kDisruptionWindowTurns;
  });
  for (const auto& r : responses) {
    const auto a = r.instruction.action;
    if (a == ActionKind::OffTaskRemark || a == ActionKind::RefuseToAnswer) {
      m.disruptions += 1;
      m.open_disruptions.push_back({r.student_id, event.turn});
    }
  }
  if (last_response_at_) {
    // Trainee think time between the previous student reply and this event.
    m.response_latency_ms.push_back(ms_between(*last_response_at_, now));
  }
  if (!responses.empty()) last_response_at_ = now;
}

Session create_session(SessionConfig config) { return Session(std::move(config)); }

std::vector<StudentResponse> submit_teacher_event(Session& session, TeacherEvent event) {
  return session.submit(std::move(event));
}

json transcript_entry_to_json(const TranscriptEntry& e) {
  json j = {{"record", "transcript"}, {"turn", e.turn}, {"speaker", e.speaker}, {"text", e.text}};
  if (e.stage_direction) j["stage_direction"] = *e.stage_direction;
  if (e.instruction) j["instruction"] = serialize_instruction(*e.instruction);
  return j;
}

json trace_to_json(const SpinTrace& t) {
  json retrieved = json::array();
  for (const auto& h : t.retrieved)
    retrieved.push_back({{"node_id", h.node_id}, {"score", h.score}, {"matched_tags", h.matched_tags}});
  json j = {{"retrieved", retrieved},
            {"node_id", t.node_id},
            {"mastery_used", t.mastery_used.to_double()},
            {"engagement_used", t.engagement_used.to_double()},
            {"wildcard_probability", t.wildcard_probability.to_double()},
            {"draws", t.draws},
            {"emotion_weights_pre", t.emotion_weights_pre},
            {"emotion_weights_post", t.emotion_weights_post},
            {"wildcard_fired", t.wildcard_fired}};
  if (t.matched_interest) j["matched_interest"] = *t.matched_interest;
  return j;
}

json response_to_json(const StudentResponse& r) {
  json u = {{"text", r.utterance.text}, {"backend_id", r.utterance.backend_id}, {"latency_ms", r.utterance.latency_ms}};
  if (r.utterance.stage_direction) u["stage_direction"] = *r.utterance.stage_direction;
  return {{"student_id", r.student_id}, {"utterance", u}, {"instruction", json_io::instruction_to_json(r.instruction)}};
}

json affect_update_json(const SessionState& s) {
  json students = json::array();
  for (const auto& slot : s.classroom.students) {
    const auto affect = effective_affect(slot.profile, slot.instances);
    json a = json::object();
    std::size_t dominant = 0;
    for (std::size_t i = 0; i < kEmotionCount; ++i) {
      a[std::string(key_name(kAllEmotions[i]))] = affect[i].to_double();
      if (affect[i] > affect[dominant]) dominant = i;
    }
    students.push_back({{"student_id", slot.profile.student_id},
                        {"affect", a},
                        {"dominant_emotion", key_name(kAllEmotions[dominant])}});
  }
  return {{"type", "affect"}, {"turn", s.turn()}, {"students", students}};
}

json session_snapshot_json(const SessionState& s, double exaggeration_factor) {
  json students = affect_update_json(s).at("students");
  for (auto& st : students) {
    const auto id = st.at("student_id").get<std::string>();
    const auto* slot = s.classroom.find(id);
    st["display_name"] = slot->profile.display_name;
    json instances = json::array();
    for (const auto& inst : slot->instances) instances.push_back(json_io::instance_to_json(inst));
    st["active_instances"] = instances;
    st["last_utterance"] = nullptr;
    for (auto it = s.transcript.rbegin(); it != s.transcript.rend(); ++it)
      if (it->speaker == id) {
        st["last_utterance"] = transcript_entry_to_json(*it);
        break;
      }
  }
  json transcript = json::array();
  for (const auto& e : s.transcript) transcript.push_back(transcript_entry_to_json(e));
  const auto m = s.metrics.snapshot(s.sessions_completed_at_stage);
  return {{"session_id", s.session_id},
          {"stage", key_name(s.stage)},
          {"turn", s.turn()},
          {"seed", s.rng_seed},
          {"exaggeration_factor", exaggeration_factor},
          {"students", students},
          {"inactive_students", s.inactive_students},
          {"transcript", transcript},
          {"metrics",
           {{"sessions_completed", m.sessions_completed},
            {"mean_response_latency_ms", m.mean_response_latency_ms},
            {"constructive_fraction", m.constructive_fraction},
            {"disruption_resolution_rate", m.disruption_resolution_rate},
            {"spin_path_median_ms", s.metrics.spin_path_median_ms()},
            {"spin_path_p95_ms", s.metrics.spin_path_p95_ms()}}}};
}

}  // namespace slotsim
