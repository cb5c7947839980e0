#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

#include "slotsim/enums.hpp"
#include "slotsim/profile.hpp"

namespace slotsim {

class ActionSet {
public:
  constexpr ActionSet() = default;
  constexpr ActionSet(std::initializer_list<ActionKind> actions) {
    for (const auto a : actions) insert(a);
  }
  static constexpr ActionSet all() {
    ActionSet s;
    for (const auto a : kAllActions) s.insert(a);
    return s;
  }

  constexpr void insert(ActionKind a) { bits_ |= bit(a); }
  [[nodiscard]] constexpr bool contains(ActionKind a) const { return (bits_ & bit(a)) != 0; }
  [[nodiscard]] constexpr std::size_t size() const {
    std::size_t n = 0;
    for (const auto a : kAllActions) n += contains(a) ? 1 : 0;
    return n;
  }
  [[nodiscard]] constexpr bool is_subset_of(ActionSet other) const { return (bits_ & ~other.bits_) == 0; }

  friend constexpr bool operator==(ActionSet, ActionSet) = default;

private:
  static constexpr std::uint8_t bit(ActionKind a) { return static_cast<std::uint8_t>(1U << index_of(a)); }
  std::uint8_t bits_ = 0;
};

inline constexpr double kUnboundedVolatility = std::numeric_limits<double>::infinity();

struct StageCaps {
  double max_volatility = kUnboundedVolatility;
  double exaggeration_factor = 1.0;  // display contrast only
  ActionSet allowed_actions = ActionSet::all();
  int max_roster_active = 30;

  friend bool operator==(const StageCaps&, const StageCaps&) = default;
};

struct StageCapsTable {
  std::array<StageCaps, 3> caps;

  [[nodiscard]] const StageCaps& operator[](RealismStage s) const { return caps[stage_number(s) - 1]; }
  StageCaps& operator[](RealismStage s) { return caps[stage_number(s) - 1]; }

  static StageCapsTable defaults();
};

StageCaps stage_caps(RealismStage stage);

// True when max_volatility and |allowed_actions| are nondecreasing and
// exaggeration_factor is nonincreasing from Stage1 to Stage3.
bool caps_are_monotone(const StageCapsTable& table);

struct StagedProfile {
  StudentProfile profile;
  StageCaps caps;
};

// Scales every modifier delta and the wildcard probability by
// max_volatility / volatility_score when the profile exceeds the cap.
// Scaled values are truncated toward zero, so the result never exceeds the cap.
StagedProfile clamp_to_stage(const StudentProfile& profile, const StageCaps& caps);
inline StagedProfile clamp_to_stage(const StudentProfile& profile, RealismStage stage) {
  return clamp_to_stage(profile, stage_caps(stage));
}

struct TraineeMetrics {
  int sessions_completed = 0;
  double mean_response_latency_ms = 0.0;
  double constructive_fraction = 0.0;
  double disruption_resolution_rate = 0.0;
};

struct ProgressionPolicy {
  int min_sessions = 3;
  double min_resolution_rate = 0.7;
};

// Advances at most one stage; never demotes.
RealismStage evaluate_progression(const TraineeMetrics& metrics, RealismStage current,
                                  const ProgressionPolicy& policy = {});

}  // namespace slotsim
