#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slotsim/enums.hpp"
#include "slotsim/profile.hpp"

namespace slotsim {

// A trainee action. AskQuestion, Compliment, HarshCritique and Proximity
// address one student; Instruction and Wait address the whole class.
struct TeacherEvent {
  TeacherEventKind kind = TeacherEventKind::Wait;
  std::optional<StudentId> target;
  std::vector<std::string> topic_tags;  // AskQuestion
  std::string text;                     // AskQuestion, Instruction
  bool near = true;                     // Proximity
  int turn = 0;

  static TeacherEvent ask(StudentId target, std::vector<std::string> tags, std::string text = {}) {
    return {TeacherEventKind::AskQuestion, std::move(target), std::move(tags), std::move(text)};
  }
  static TeacherEvent compliment(StudentId target) { return {TeacherEventKind::Compliment, std::move(target), {}, {}}; }
  static TeacherEvent critique(StudentId target) { return {TeacherEventKind::HarshCritique, std::move(target), {}, {}}; }
  static TeacherEvent instruction(std::string text) {
    return {TeacherEventKind::Instruction, std::nullopt, {}, std::move(text)};
  }
  static TeacherEvent proximity(StudentId target, bool near) {
    return {TeacherEventKind::Proximity, std::move(target), {}, {}, near};
  }
  static TeacherEvent wait() { return {}; }

  [[nodiscard]] bool is_targeted() const {
    return kind == TeacherEventKind::AskQuestion || kind == TeacherEventKind::Compliment ||
           kind == TeacherEventKind::HarshCritique || kind == TeacherEventKind::Proximity;
  }

  friend bool operator==(const TeacherEvent&, const TeacherEvent&) = default;
};

// Throws MALFORMED when the event's shape does not fit its kind
// (missing target, uppercase tags, stray fields).
void check_event_shape(const TeacherEvent& event);

}  // namespace slotsim
