#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "slotsim/enums.hpp"
#include "slotsim/error.hpp"
#include "slotsim/fixed.hpp"

namespace slotsim {

using StudentId = std::string;
using NodeId = std::string;

struct KnowledgeNode {
  NodeId node_id;
  std::vector<std::string> topic_tags;
  std::string description;
  Fixed4 mastery;
  std::vector<NodeId> prerequisites;

  friend bool operator==(const KnowledgeNode&, const KnowledgeNode&) = default;
};

// Baseline intensity per emotion, indexed by EmotionId. Intensities are
// independent and need not sum to one.
struct AffectiveState {
  std::array<Fixed4, kEmotionCount> baseline{};

  [[nodiscard]] Fixed4 operator[](EmotionId e) const { return baseline[index_of(e)]; }
  Fixed4& operator[](EmotionId e) { return baseline[index_of(e)]; }

  friend bool operator==(const AffectiveState&, const AffectiveState&) = default;
};

struct SocialLink {
  StudentId peer;
  Fixed4 affinity;  // [-1, 1]

  friend bool operator==(const SocialLink&, const SocialLink&) = default;
};

struct BehavioralTraits {
  Fixed4 openness_to_feedback;
  std::vector<std::string> interests;
  std::vector<SocialLink> social_links;

  friend bool operator==(const BehavioralTraits&, const BehavioralTraits&) = default;
};

// Address of a single tunable parameter:
//   affective.<emotion>  |  behavioral.openness_to_feedback  |  cognitive.<node_id>.mastery
struct ParameterPath {
  struct Affect {
    EmotionId emotion;
    friend bool operator==(const Affect&, const Affect&) = default;
  };
  struct Openness {
    friend bool operator==(const Openness&, const Openness&) = default;
  };
  struct Mastery {
    NodeId node_id;
    friend bool operator==(const Mastery&, const Mastery&) = default;
  };

  std::variant<Affect, Openness, Mastery> target;

  static std::optional<ParameterPath> parse(std::string_view text);
  static ParameterPath affect(EmotionId e) { return {Affect{e}}; }
  static ParameterPath openness() { return {Openness{}}; }
  static ParameterPath mastery(NodeId id) { return {Mastery{std::move(id)}}; }

  [[nodiscard]] std::string str() const;

  friend bool operator==(const ParameterPath&, const ParameterPath&) = default;
};

// Which students a rule listens to, relative to the event's target.
enum class TargetPredicate {
  Self,    // the event addresses this student (untargeted events address everyone)
  Others,  // the event addresses a classmate
  Any,
};

struct RuleTrigger {
  TeacherEventKind kind = TeacherEventKind::Compliment;
  TargetPredicate target = TargetPredicate::Self;
  std::optional<bool> near;  // Proximity only

  friend bool operator==(const RuleTrigger&, const RuleTrigger&) = default;
};

struct Effect {
  ParameterPath path;
  Fixed4 delta;

  friend bool operator==(const Effect&, const Effect&) = default;
};

struct ModifierRule {
  std::string rule_id;
  RuleTrigger trigger;
  std::vector<Effect> effects;
  int ttl_turns = 4;

  friend bool operator==(const ModifierRule&, const ModifierRule&) = default;
};

inline constexpr Fixed4 kDefaultWildcard = Fixed4::from_units(200);
inline constexpr Fixed4 kMaxWildcard = Fixed4::from_units(1000);

struct StudentProfile {
  StudentId student_id;
  std::string display_name;
  std::string persona_blurb;
  std::vector<KnowledgeNode> cognitive;
  AffectiveState affective;
  BehavioralTraits behavioral;
  std::vector<ModifierRule> modifiers;
  Fixed4 wildcard_probability = kDefaultWildcard;

  [[nodiscard]] const KnowledgeNode* find_node(std::string_view id) const;

  friend bool operator==(const StudentProfile&, const StudentProfile&) = default;
};

// A live, decaying copy of a rule's effects on one student.
struct ModifierInstance {
  std::string instance_id;
  std::string rule_id;
  int created_turn = 0;
  int ttl_turns = 1;
  int remaining_turns = 1;
  std::vector<Effect> original;
  std::vector<Effect> current;

  friend bool operator==(const ModifierInstance&, const ModifierInstance&) = default;
};

ValidationReport validate_profile(const StudentProfile& profile);

// True when `path` names a parameter that exists on `profile`.
bool resolves(const StudentProfile& profile, const ParameterPath& path);

Fixed4 baseline_parameter(const StudentProfile& profile, const ParameterPath& path);

// clamp(baseline + sum of current deltas touching path, 0, 1). Throws UNKNOWN_PATH.
Fixed4 effective_parameter(const StudentProfile& profile, const std::vector<ModifierInstance>& active,
                           const ParameterPath& path);

std::array<Fixed4, kEmotionCount> effective_affect(const StudentProfile& profile,
                                                   const std::vector<ModifierInstance>& active);

// Sum of |delta| over every rule effect plus ten times the wildcard probability.
double volatility_score(const StudentProfile& profile);
std::int64_t volatility_units(const StudentProfile& profile);

// Lowercase tokens of a tag, split on whitespace, '-', '_' and '/'.
std::vector<std::string> tag_tokens(std::string_view tag);

}  // namespace slotsim
