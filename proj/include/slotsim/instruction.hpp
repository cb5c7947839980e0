#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "slotsim/enums.hpp"

namespace slotsim {

// The spin's output and the contract handed to the performer.
struct BehavioralInstruction {
  ActionKind action = ActionKind::StaySilent;
  int confidence_pct = 0;
  EmotionId emotion = EmotionId::Engagement;
  ToneTag tone = ToneTag::Attentive;
  std::optional<std::string> contextual_note;

  friend bool operator==(const BehavioralInstruction&, const BehavioralInstruction&) = default;
};

// Canonical form:
//   [Action: <A>; Confidence: <n>%; Emotion: <E>; Tone: <T>; Contextual_Note: <note>]
// The Contextual_Note segment is omitted when there is no note.
std::string serialize_instruction(const BehavioralInstruction& instruction);

// Strict inverse of serialize_instruction. Throws MALFORMED, UNKNOWN_ENUM or RANGE.
BehavioralInstruction parse_instruction(std::string_view text);

}  // namespace slotsim
