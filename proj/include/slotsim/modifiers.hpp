#pragma once

#include <string>
#include <vector>

#include "slotsim/events.hpp"
#include "slotsim/profile.hpp"

namespace slotsim {

struct ModifierDefaults {
  int ttl_turns = 4;
  // Applied to the addressed student when the profile has no rule for the event kind.
  std::vector<Effect> compliment = {
      {ParameterPath::affect(EmotionId::PrideAccomplishment), Fixed4::from_units(1000)},
      {ParameterPath::affect(EmotionId::AnxietyShyness), Fixed4::from_units(-500)},
  };
  std::vector<Effect> harsh_critique = {
      {ParameterPath::affect(EmotionId::Engagement), Fixed4::from_units(-1000)},
      {ParameterPath::affect(EmotionId::Resentment), Fixed4::from_units(1000)},
  };
};

struct PeerInfluenceConfig {
  Fixed4 engagement_threshold = Fixed4::from_units(3000);
  Fixed4 coupling = Fixed4::from_units(500);
};

struct StudentSlot {
  StudentProfile profile;
  std::vector<ModifierInstance> instances;  // ordered by instance_id

  friend bool operator==(const StudentSlot&, const StudentSlot&) = default;
};

// The mutable part of a classroom: each student's profile snapshot and live modifier instances.
struct ClassroomState {
  std::vector<StudentSlot> students;
  int turn = 0;

  [[nodiscard]] StudentSlot* find(std::string_view id);
  [[nodiscard]] const StudentSlot* find(std::string_view id) const;

  friend bool operator==(const ClassroomState&, const ClassroomState&) = default;
};

ClassroomState make_classroom(const std::vector<StudentProfile>& profiles);

// Instantiates every matching rule; returns the new instance ids.
// Throws UNKNOWN_TARGET (leaving state untouched) if the target is absent.
std::vector<std::string> apply_event(ClassroomState& state, const TeacherEvent& event,
                                     const ModifierDefaults& defaults = {});

// One turn of linear decay; expired instances are dropped.
void tick_decay(ClassroomState& state);

// Disengaged students pull on linked peers with one-turn Engagement instances.
// Returns the new instance ids.
std::vector<std::string> propagate_peer_influence(ClassroomState& state, const PeerInfluenceConfig& config = {});

ModifierInstance instantiate(const std::string& instance_id, const std::string& rule_id, int turn, int ttl,
                             const std::vector<Effect>& effects);

}  // namespace slotsim
