#include "slotsim/enums.hpp"

#include <string_view>
#include <utility>

namespace slotsim {
namespace {

template <typename E, std::size_t N>
struct NameTable {
  std::array<std::pair<E, std::string_view>, N> entries;

  [[nodiscard]] constexpr std::string_view name(E e) const {
    for (const auto& [k, v] : entries)
      if (k == e) return v;
    return {};
  }
  [[nodiscard]] constexpr std::optional<E> find(std::string_view s) const {
    for (const auto& [k, v] : entries)
      if (v == s) return k;
    return std::nullopt;
  }
};

constexpr NameTable<EmotionId, 10> kEmotionKeys{{{
    {EmotionId::Joy, "joy"},
    {EmotionId::Engagement, "engagement"},
    {EmotionId::Confusion, "confusion"},
    {EmotionId::AnxietyShyness, "anxiety_shyness"},
    {EmotionId::PrideAccomplishment, "pride_accomplishment"},
    {EmotionId::Resentment, "resentment"},
    {EmotionId::Boredom, "boredom"},
    {EmotionId::Frustration, "frustration"},
    {EmotionId::Curiosity, "curiosity"},
    {EmotionId::Excitement, "excitement"},
}}};

constexpr NameTable<EmotionId, 10> kEmotionDisplay{{{
    {EmotionId::Joy, "Joy"},
    {EmotionId::Engagement, "Engagement"},
    {EmotionId::Confusion, "Confusion"},
    {EmotionId::AnxietyShyness, "Anxiety Shyness"},
    {EmotionId::PrideAccomplishment, "Pride Accomplishment"},
    {EmotionId::Resentment, "Resentment"},
    {EmotionId::Boredom, "Boredom"},
    {EmotionId::Frustration, "Frustration"},
    {EmotionId::Curiosity, "Curiosity"},
    {EmotionId::Excitement, "Excitement"},
}}};

constexpr NameTable<ActionKind, 6> kActionKeys{{{
    {ActionKind::AnswerCorrectly, "answer_correctly"},
    {ActionKind::AnswerIncorrectly, "answer_incorrectly"},
    {ActionKind::AskClarification, "ask_clarification"},
    {ActionKind::RefuseToAnswer, "refuse_to_answer"},
    {ActionKind::OffTaskRemark, "off_task_remark"},
    {ActionKind::StaySilent, "stay_silent"},
}}};

constexpr NameTable<ActionKind, 6> kActionDisplay{{{
    {ActionKind::AnswerCorrectly, "Answer Correctly"},
    {ActionKind::AnswerIncorrectly, "Answer Incorrectly"},
    {ActionKind::AskClarification, "Ask Clarification"},
    {ActionKind::RefuseToAnswer, "Refuse To Answer"},
    {ActionKind::OffTaskRemark, "Off Task Remark"},
    {ActionKind::StaySilent, "Stay Silent"},
}}};

constexpr NameTable<ToneTag, 10> kToneKeys{{{
    {ToneTag::Eager, "eager"},
    {ToneTag::Confident, "confident"},
    {ToneTag::Attentive, "attentive"},
    {ToneTag::Hesitant, "hesitant"},
    {ToneTag::Quiet, "quiet"},
    {ToneTag::Curt, "curt"},
    {ToneTag::Flat, "flat"},
    {ToneTag::Sharp, "sharp"},
    {ToneTag::Inquisitive, "inquisitive"},
    {ToneTag::Animated, "animated"},
}}};

constexpr NameTable<ToneTag, 10> kToneDisplay{{{
    {ToneTag::Eager, "Eager"},
    {ToneTag::Confident, "Confident"},
    {ToneTag::Attentive, "Attentive"},
    {ToneTag::Hesitant, "Hesitant"},
    {ToneTag::Quiet, "Quiet"},
    {ToneTag::Curt, "Curt"},
    {ToneTag::Flat, "Flat"},
    {ToneTag::Sharp, "Sharp"},
    {ToneTag::Inquisitive, "Inquisitive"},
    {ToneTag::Animated, "Animated"},
}}};

constexpr NameTable<TeacherEventKind, 6> kEventKeys{{{
    {TeacherEventKind::AskQuestion, "ask_question"},
    {TeacherEventKind::Compliment, "compliment"},
    {TeacherEventKind::HarshCritique, "harsh_critique"},
    {TeacherEventKind::Instruction, "instruction"},
    {TeacherEventKind::Proximity, "proximity"},
    {TeacherEventKind::Wait, "wait"},
}}};

constexpr NameTable<RealismStage, 3> kStageKeys{{{
    {RealismStage::Stage1, "stage1"},
    {RealismStage::Stage2, "stage2"},
    {RealismStage::Stage3, "stage3"},
}}};

}  // namespace

std::string_view key_name(EmotionId e) { return kEmotionKeys.name(e); }
std::string_view key_name(ActionKind a) { return kActionKeys.name(a); }
std::string_view key_name(ToneTag t) { return kToneKeys.name(t); }
std::string_view key_name(TeacherEventKind k) { return kEventKeys.name(k); }
std::string_view key_name(RealismStage s) { return kStageKeys.name(s); }

std::string_view display_name(EmotionId e) { return kEmotionDisplay.name(e); }
std::string_view display_name(ActionKind a) { return kActionDisplay.name(a); }
std::string_view display_name(ToneTag t) { return kToneDisplay.name(t); }

std::optional<EmotionId> emotion_from_key(std::string_view s) { return kEmotionKeys.find(s); }
std::optional<ActionKind> action_from_key(std::string_view s) { return kActionKeys.find(s); }
std::optional<ToneTag> tone_from_key(std::string_view s) { return kToneKeys.find(s); }
std::optional<TeacherEventKind> event_kind_from_key(std::string_view s) { return kEventKeys.find(s); }
std::optional<RealismStage> stage_from_key(std::string_view s) { return kStageKeys.find(s); }

std::optional<EmotionId> emotion_from_display(std::string_view s) { return kEmotionDisplay.find(s); }
std::optional<ActionKind> action_from_display(std::string_view s) { return kActionDisplay.find(s); }
std::optional<ToneTag> tone_from_display(std::string_view s) { return kToneDisplay.find(s); }

}  // namespace slotsim
