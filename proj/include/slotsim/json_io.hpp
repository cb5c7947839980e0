#pragma once

#include <initializer_list>
#include <string_view>

#include <json.hpp>

#include "slotsim/events.hpp"
#include "slotsim/instruction.hpp"
#include "slotsim/profile.hpp"
#include "slotsim/retrieval.hpp"

namespace slotsim::json_io {

using nlohmann::json;

// Throws `code` when `obj` is not an object or carries a key outside `allowed`.
void require_keys_within(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where,
                         ErrorCode code = ErrorCode::SchemaMismatch);

json fixed_to_json(Fixed4 v);

json profile_to_json(const StudentProfile& p);
StudentProfile profile_from_json(const json& j);

json roster_to_json(const Roster& r);
Roster roster_from_json(const json& j);

json event_to_json(const TeacherEvent& e);
// Throws MALFORMED.
TeacherEvent event_from_json(const json& j);

json instruction_to_json(const BehavioralInstruction& i);
BehavioralInstruction instruction_from_json(const json& j);

json instance_to_json(const ModifierInstance& m);

json report_to_json(const ValidationReport& r);

}  // namespace slotsim::json_io
