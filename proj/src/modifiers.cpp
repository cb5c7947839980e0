#include "slotsim/modifiers.hpp"

#include <algorithm>
#include <cctype>

namespace slotsim {
namespace {

bool rule_matches(const ModifierRule& rule, const TeacherEvent& event, bool addressed) {
  if (rule.trigger.kind != event.kind) return false;
  if (rule.trigger.near && *rule.trigger.near != event.near) return false;
  switch (rule.trigger.target) {
    case TargetPredicate::Self: return addressed;
    case TargetPredicate::Others: return event.is_targeted() && !addressed;
    case TargetPredicate::Any: return true;
  }
  return false;
}

const std::vector<Effect>* builtin_effects(TeacherEventKind kind, const ModifierDefaults& defaults) {
  if (kind == TeacherEventKind::Compliment) return &defaults.compliment;
  if (kind == TeacherEventKind::HarshCritique) return &defaults.harsh_critique;
  return nullptr;
}

// Ids depend only on (student, rule, turn, cause), never on application
// order, so events addressing different students commute exactly.
std::string instance_id(const StudentSlot& slot, std::string_view rule_id, int turn, std::string_view cause) {
  std::string base = slot.profile.student_id + ":" + std::string(rule_id) + "@t" + std::to_string(turn);
  if (!cause.empty()) base += "/" + std::string(cause);
  std::string id = base;
  for (int n = 2; std::any_of(slot.instances.begin(), slot.instances.end(),
                              [&](const ModifierInstance& m) { return m.instance_id == id; });
       ++n)
    id = base + "#" + std::to_string(n);
  return id;
}

std::string event_cause(const TeacherEvent& e) {
  std::string cause(key_name(e.kind));
  if (e.target) cause += ":" + *e.target;
  return cause;
}

void insert_sorted(std::vector<ModifierInstance>& list, ModifierInstance inst) {
  const auto pos = std::upper_bound(list.begin(), list.end(), inst.instance_id,
                                    [](const std::string& id, const ModifierInstance& m) { return id < m.instance_id; });
  list.insert(pos, std::move(inst));
}

}  // namespace

void check_event_shape(const TeacherEvent& e) {
  if (e.is_targeted() && (!e.target || e.target->empty()))
    throw Error(ErrorCode::Malformed, std::string(key_name(e.kind)) + " requires a target");
  if (!e.is_targeted() && e.target)
    throw Error(ErrorCode::Malformed, std::string(key_name(e.kind)) + " does not take a target");
  if (e.kind != TeacherEventKind::AskQuestion && !e.topic_tags.empty())
    throw Error(ErrorCode::Malformed, "topic_tags only apply to ask_question");
  for (const auto& t : e.topic_tags)
    if (t.empty() || std::any_of(t.begin(), t.end(), [](unsigned char c) { return std::isupper(c) != 0; }))
      throw Error(ErrorCode::Malformed, "topic tag '" + t + "' must be non-empty lowercase");
}

StudentSlot* ClassroomState::find(std::string_view id) {
  for (auto& s : students)
    if (s.profile.student_id == id) return &s;
  return nullptr;
}

const StudentSlot* ClassroomState::find(std::string_view id) const {
  for (const auto& s : students)
    if (s.profile.student_id == id) return &s;
  return nullptr;
}

ClassroomState make_classroom(const std::vector<StudentProfile>& profiles) {
  ClassroomState state;
  for (const auto& p : profiles) state.students.push_back({p, {}});
  return state;
}

ModifierInstance instantiate(const std::string& instance_id, const std::string& rule_id, int turn, int ttl,
                             const std::vector<Effect>& effects) {
  return {instance_id, rule_id, turn, ttl, ttl, effects, effects};
}

std::vector<std::string> apply_event(ClassroomState& state, const TeacherEvent& event,
                                     const ModifierDefaults& defaults) {
  check_event_shape(event);
  if (event.is_targeted() && !state.find(*event.target))
    throw Error(ErrorCode::UnknownTarget, "no student '" + *event.target + "' in this session");

  std::vector<std::string> created;
  for (auto& slot : state.students) {
    const bool addressed = !event.is_targeted() || *event.target == slot.profile.student_id;
    bool has_rule_for_kind = false;
    for (const auto& rule : slot.profile.modifiers) {
      has_rule_for_kind = has_rule_for_kind || rule.trigger.kind == event.kind;
      if (!rule_matches(rule, event, addressed)) continue;
      auto id = instance_id(slot, rule.rule_id, event.turn, event_cause(event));
      insert_sorted(slot.instances, instantiate(id, rule.rule_id, event.turn, rule.ttl_turns, rule.effects));
      created.push_back(std::move(id));
    }
    const auto* builtin = builtin_effects(event.kind, defaults);
    if (!has_rule_for_kind && builtin && event.is_targeted() && addressed && !builtin->empty()) {
      const std::string rule_id = "default:" + std::string(key_name(event.kind));
      auto id = instance_id(slot, rule_id, event.turn, event_cause(event));
      insert_sorted(slot.instances, instantiate(id, rule_id, event.turn, defaults.ttl_turns, *builtin));
      created.push_back(std::move(id));
    }
  }
  return created;
}

void tick_decay(ClassroomState& state) {
  for (auto& slot : state.students) {
    auto& list = slot.instances;
    for (auto& inst : list) {
      inst.remaining_turns = std::max(0, inst.remaining_turns - 1);
      for (std::size_t i = 0; i < inst.current.size(); ++i)
        inst.current[i].delta = inst.original[i].delta.scaled_round(inst.remaining_turns, inst.ttl_turns);
    }
    std::erase_if(list, [](const ModifierInstance& m) { return m.remaining_turns == 0; });
  }
}

std::vector<std::string> propagate_peer_influence(ClassroomState& state, const PeerInfluenceConfig& config) {
  const auto engagement = ParameterPath::affect(EmotionId::Engagement);

  struct Pending {
    StudentSlot* peer;
    std::string rule_id;
    Fixed4 delta;
  };
  // Collect against the pre-propagation snapshot so student order does not matter.
  std::vector<Pending> pending;
  for (const auto& slot : state.students) {
    if (effective_parameter(slot.profile, slot.instances, engagement) >= config.engagement_threshold) continue;
    for (const auto& link : slot.profile.behavioral.social_links) {
      if (link.affinity == Fixed4::zero()) continue;
      StudentSlot* peer = state.find(link.peer);
      if (!peer || peer == &slot) continue;
      const Fixed4 magnitude = link.affinity.abs() * config.coupling;
      if (magnitude == Fixed4::zero()) continue;
      pending.push_back({peer, "peer:" + slot.profile.student_id,
                         link.affinity > Fixed4::zero() ? -magnitude : magnitude});
    }
  }

  std::vector<std::string> created;
  for (auto& p : pending) {
    auto id = instance_id(*p.peer, p.rule_id, state.turn, {});
    insert_sorted(p.peer->instances, instantiate(id, p.rule_id, state.turn, 1, {{engagement, p.delta}}));
    created.push_back(std::move(id));
  }
  return created;
}

}  // namespace slotsim
