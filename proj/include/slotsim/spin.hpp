#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "slotsim/instruction.hpp"
#include "slotsim/profile.hpp"
#include "slotsim/random.hpp"
#include "slotsim/retrieval.hpp"
#include "slotsim/stage.hpp"

namespace slotsim {

struct SpinConfig {
  // Share of the failure mass given to each action; only the failure actions
  // (everything except AnswerCorrectly and OffTaskRemark) are consulted.
  std::array<double, kActionCount> failure_weights = {0.0, 0.6, 0.3, 0.1, 0.0, 0.0};
  double emotion_conditioning = 1.5;
  int retrieval_k = 3;
};

struct SpinContext {
  std::vector<std::string> topic_tags;
  std::string text;  // the teacher's words; their tokens also count for interest matching
  StudentId student_id;
  int turn = 0;
  StageCaps caps;
};

struct SpinTrace {
  std::vector<RetrievalHit> retrieved;
  NodeId node_id;
  Fixed4 mastery_used;
  Fixed4 engagement_used;
  Fixed4 wildcard_probability;
  std::vector<double> draws;
  std::array<double, kEmotionCount> emotion_weights_pre{};   // effective intensities
  std::array<double, kEmotionCount> emotion_weights_post{};  // conditioned and normalized
  bool wildcard_fired = false;
  std::optional<std::string> matched_interest;
};

struct SpinOutcome {
  BehavioralInstruction instruction;
  SpinTrace trace;
};

inline constexpr std::size_t kMaxDrawsPerSpin = 4;

// u < mastery gives AnswerCorrectly; otherwise a second draw splits the
// failure mass among the stage-allowed failure actions.
ActionKind sample_action(Fixed4 mastery, const StageCaps& caps, RandomSource& rng, const SpinConfig& config = {},
                         std::vector<double>* draws = nullptr);

// Action-conditioned, normalized emotion weights. All-zero intensities give a uniform distribution.
std::array<double, kEmotionCount> conditioned_emotion_weights(const std::array<Fixed4, kEmotionCount>& intensities,
                                                              ActionKind action, double factor = 1.5);

EmotionId sample_emotion(const std::array<Fixed4, kEmotionCount>& intensities, ActionKind action, RandomSource& rng,
                         double factor = 1.5, std::vector<double>* draws = nullptr);

ToneTag derive_tone(EmotionId emotion, const BehavioralTraits& traits = {});

// Lowercase alphanumeric words of free text.
std::vector<std::string> text_tokens(std::string_view text);

// First interest sharing a token with the context tags or the teacher's words.
std::optional<std::string> match_interest(const BehavioralTraits& traits, const SpinContext& ctx);

int confidence_from_engagement(Fixed4 engagement);

// One pass: wildcard draw, retrieval, action, emotion, tone, note, confidence.
// Throws EMPTY_CONTEXT when no knowledge node can be retrieved.
SpinOutcome spin(const StudentProfile& profile, const std::vector<ModifierInstance>& active, const SpinContext& ctx,
                 RandomSource& rng, const SpinConfig& config = {});

// Wildcard-only spin for a student nobody addressed: consumes one draw and
// returns an OffTaskRemark outcome only when the wildcard fires.
std::optional<SpinOutcome> spin_unaddressed(const StudentProfile& profile, const std::vector<ModifierInstance>& active,
                                            const SpinContext& ctx, RandomSource& rng, const SpinConfig& config = {});

}  // namespace slotsim
