#pragma once

#include <string>

#include "slotsim/profile.hpp"
#include "slotsim/retrieval.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) { return std::string(SLOTSIM_DATA_DIR) + "/" + name; }

inline slotsim::Fixed4 fx(double v) { return slotsim::Fixed4::from_double(v); }

inline slotsim::KnowledgeNode node(std::string id, std::vector<std::string> tags, double mastery,
                                   std::string description = {}) {
  return {std::move(id), std::move(tags), std::move(description), fx(mastery), {}};
}

// Minimal valid profile with a fallback node and one topic node.
inline slotsim::StudentProfile simple_student(std::string id, double mastery = 0.5, double wildcard = 0.0) {
  slotsim::StudentProfile p;
  p.student_id = id;
  p.display_name = id;
  p.cognitive = {node("general", {"general"}, 0.5), node("topic", {"topic"}, mastery, "2 + 2 = 4")};
  p.behavioral.openness_to_feedback = fx(0.5);
  for (auto e : slotsim::kAllEmotions) p.affective[e] = fx(0.5);
  p.wildcard_probability = fx(wildcard);
  return p;
}

inline slotsim::Roster demo_roster() { return slotsim::load_roster(data_path("demo_roster.json")); }

inline std::string roster_text() { return slotsim::roster_to_text(demo_roster()); }

inline slotsim::StudentProfile devin() { return *demo_roster().find("devin"); }

}  // namespace fixtures
