#include "slotsim/stage.hpp"

#include <cmath>

namespace slotsim {

StageCapsTable StageCapsTable::defaults() {
  using enum ActionKind;
  StageCapsTable t;
  t.caps[0] = {0.2, 2.0, ActionSet{AnswerCorrectly, AnswerIncorrectly, AskClarification}, 5};
  t.caps[1] = {0.5, 1.0, ActionSet{AnswerCorrectly, AnswerIncorrectly, AskClarification, StaySilent}, 15};
  t.caps[2] = {kUnboundedVolatility, 0.5, ActionSet::all(), 30};
  return t;
}

StageCaps stage_caps(RealismStage stage) { return StageCapsTable::defaults()[stage]; }

bool caps_are_monotone(const StageCapsTable& table) {
  for (std::size_t i = 0; i + 1 < table.caps.size(); ++i) {
    const auto& lo = table.caps[i];
    const auto& hi = table.caps[i + 1];
    if (lo.max_volatility > hi.max_volatility) return false;
    if (lo.allowed_actions.size() > hi.allowed_actions.size()) return false;
    if (lo.exaggeration_factor < hi.exaggeration_factor) return false;
  }
  return true;
}

StagedProfile clamp_to_stage(const StudentProfile& profile, const StageCaps& caps) {
  StagedProfile out{profile, caps};
  if (std::isinf(caps.max_volatility)) return out;

  const auto cap_units = static_cast<std::int64_t>(std::floor(caps.max_volatility * Fixed4::kScale + 1e-9));
  const std::int64_t vol = volatility_units(profile);
  if (vol <= cap_units) return out;

  for (auto& rule : out.profile.modifiers)
    for (auto& e : rule.effects) e.delta = e.delta.scaled_trunc(cap_units, vol);
  out.profile.wildcard_probability = out.profile.wildcard_probability.scaled_trunc(cap_units, vol);
  return out;
}

RealismStage evaluate_progression(const TraineeMetrics& metrics, RealismStage current,
                                  const ProgressionPolicy& policy) {
  if (current == RealismStage::Stage3) return current;
  if (metrics.sessions_completed >= policy.min_sessions &&
      metrics.disruption_resolution_rate >= policy.min_resolution_rate)
    return static_cast<RealismStage>(stage_number(current) + 1);
  return current;
}

}  // namespace slotsim
