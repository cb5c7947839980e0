#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace slotsim {

enum class EmotionId {
  Joy,
  Engagement,
  Confusion,
  AnxietyShyness,
  PrideAccomplishment,
  Resentment,
  Boredom,
  Frustration,
  Curiosity,
  Excitement,
};
inline constexpr std::size_t kEmotionCount = 10;
inline constexpr std::array<EmotionId, kEmotionCount> kAllEmotions = {
    EmotionId::Joy,           EmotionId::Engagement,          EmotionId::Confusion,
    EmotionId::AnxietyShyness, EmotionId::PrideAccomplishment, EmotionId::Resentment,
    EmotionId::Boredom,       EmotionId::Frustration,         EmotionId::Curiosity,
    EmotionId::Excitement,
};

enum class ActionKind {
  AnswerCorrectly,
  AnswerIncorrectly,
  AskClarification,
  RefuseToAnswer,
  OffTaskRemark,
  StaySilent,
};
inline constexpr std::size_t kActionCount = 6;
inline constexpr std::array<ActionKind, kActionCount> kAllActions = {
    ActionKind::AnswerCorrectly, ActionKind::AnswerIncorrectly, ActionKind::AskClarification,
    ActionKind::RefuseToAnswer,  ActionKind::OffTaskRemark,     ActionKind::StaySilent,
};

enum class ToneTag {
  Eager,
  Confident,
  Attentive,
  Hesitant,
  Quiet,
  Curt,
  Flat,
  Sharp,
  Inquisitive,
  Animated,
};
inline constexpr std::size_t kToneCount = 10;
inline constexpr std::array<ToneTag, kToneCount> kAllTones = {
    ToneTag::Eager, ToneTag::Confident, ToneTag::Attentive, ToneTag::Hesitant, ToneTag::Quiet,
    ToneTag::Curt,  ToneTag::Flat,      ToneTag::Sharp,     ToneTag::Inquisitive, ToneTag::Animated,
};

enum class TeacherEventKind {
  AskQuestion,
  Compliment,
  HarshCritique,
  Instruction,
  Proximity,
  Wait,
};
inline constexpr std::array<TeacherEventKind, 6> kAllEventKinds = {
    TeacherEventKind::AskQuestion, TeacherEventKind::Compliment, TeacherEventKind::HarshCritique,
    TeacherEventKind::Instruction, TeacherEventKind::Proximity,  TeacherEventKind::Wait,
};

enum class RealismStage { Stage1 = 1, Stage2 = 2, Stage3 = 3 };
inline constexpr std::array<RealismStage, 3> kAllStages = {RealismStage::Stage1, RealismStage::Stage2,
                                                           RealismStage::Stage3};

constexpr std::size_t index_of(EmotionId e) { return static_cast<std::size_t>(e); }
constexpr std::size_t index_of(ActionKind a) { return static_cast<std::size_t>(a); }
constexpr std::size_t index_of(ToneTag t) { return static_cast<std::size_t>(t); }
constexpr int stage_number(RealismStage s) { return static_cast<int>(s); }

// snake_case identifiers used in JSON files and parameter paths.
std::string_view key_name(EmotionId e);
std::string_view key_name(ActionKind a);
std::string_view key_name(ToneTag t);
std::string_view key_name(TeacherEventKind k);
std::string_view key_name(RealismStage s);

// "Title Case With Spaces" names used in the canonical instruction string.
std::string_view display_name(EmotionId e);
std::string_view display_name(ActionKind a);
std::string_view display_name(ToneTag t);

std::optional<EmotionId> emotion_from_key(std::string_view s);
std::optional<ActionKind> action_from_key(std::string_view s);
std::optional<ToneTag> tone_from_key(std::string_view s);
std::optional<TeacherEventKind> event_kind_from_key(std::string_view s);
std::optional<RealismStage> stage_from_key(std::string_view s);

std::optional<EmotionId> emotion_from_display(std::string_view s);
std::optional<ActionKind> action_from_display(std::string_view s);
std::optional<ToneTag> tone_from_display(std::string_view s);

}  // namespace slotsim
