#include "slotsim/json_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace slotsim::json_io {
namespace {

[[noreturn]] void schema_error(std::string_view where, const std::string& what) {
  throw Error(ErrorCode::SchemaMismatch, std::string(where) + ": " + what);
}

const json& field(const json& obj, std::string_view key, std::string_view where) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) schema_error(where, "missing field '" + std::string(key) + "'");
  return *it;
}

std::string get_string(const json& obj, std::string_view key, std::string_view where) {
  const auto& v = field(obj, key, where);
  if (!v.is_string()) schema_error(where, "'" + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

Fixed4 to_fixed(const json& v, std::string_view where) {
  if (!v.is_number()) schema_error(where, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema_error(where, "non-finite number");
  return Fixed4::from_double(d);
}

Fixed4 get_fixed(const json& obj, std::string_view key, std::string_view where) {
  return to_fixed(field(obj, key, where), std::string(where) + "." + std::string(key));
}

std::vector<std::string> get_strings(const json& obj, std::string_view key, std::string_view where) {
  const auto& v = field(obj, key, where);
  if (!v.is_array()) schema_error(where, "'" + std::string(key) + "' must be an array");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) schema_error(where, "'" + std::string(key) + "' must hold strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

std::string_view target_key(TargetPredicate p) {
  switch (p) {
    case TargetPredicate::Self: return "self";
    case TargetPredicate::Others: return "others";
    case TargetPredicate::Any: return "any";
  }
  return "self";
}

}  // namespace

void require_keys_within(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where,
                         ErrorCode code) {
  if (!obj.is_object()) throw Error(code, std::string(where) + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw Error(code, std::string(where) + ": unknown field '" + key + "'");
  }
}

json fixed_to_json(Fixed4 v) { return v.to_double(); }

json profile_to_json(const StudentProfile& p) {
  json cognitive = json::array();
  for (const auto& n : p.cognitive) {
    cognitive.push_back({{"node_id", n.node_id},
                         {"topic_tags", n.topic_tags},
                         {"description", n.description},
                         {"mastery", fixed_to_json(n.mastery)},
                         {"prerequisites", n.prerequisites}});
  }
  json affective = json::object();
  for (const auto e : kAllEmotions) affective[std::string(key_name(e))] = fixed_to_json(p.affective[e]);

  json links = json::array();
  for (const auto& l : p.behavioral.social_links)
    links.push_back({{"peer", l.peer}, {"affinity", fixed_to_json(l.affinity)}});

  json modifiers = json::array();
  for (const auto& r : p.modifiers) {
    json trigger = {{"kind", key_name(r.trigger.kind)}, {"target", target_key(r.trigger.target)}};
    if (r.trigger.near) trigger["near"] = *r.trigger.near;
    json effects = json::array();
    for (const auto& e : r.effects) effects.push_back({{"path", e.path.str()}, {"delta", fixed_to_json(e.delta)}});
    modifiers.push_back({{"rule_id", r.rule_id},
                         {"trigger", trigger},
                         {"effects", effects},
                         {"ttl_turns", r.ttl_turns},
                         {"decay", "linear"}});
  }

  return {{"student_id", p.student_id},
          {"display_name", p.display_name},
          {"persona_blurb", p.persona_blurb},
          {"cognitive", cognitive},
          {"affective", affective},
          {"behavioral",
           {{"openness_to_feedback", fixed_to_json(p.behavioral.openness_to_feedback)},
            {"interests", p.behavioral.interests},
            {"social_links", links}}},
          {"modifiers", modifiers},
          {"wildcard_probability", fixed_to_json(p.wildcard_probability)}};
}

StudentProfile profile_from_json(const json& j) {
  constexpr std::string_view where = "student";
  require_keys_within(j,
                      {"student_id", "display_name", "persona_blurb", "cognitive", "affective", "behavioral",
                       "modifiers", "wildcard_probability"},
                      where);
  StudentProfile p;
  p.student_id = get_string(j, "student_id", where);
  const std::string at = "student '" + p.student_id + "'";
  p.display_name = j.contains("display_name") ? get_string(j, "display_name", at) : p.student_id;
  p.persona_blurb = j.contains("persona_blurb") ? get_string(j, "persona_blurb", at) : "";
  if (j.contains("wildcard_probability")) p.wildcard_probability = get_fixed(j, "wildcard_probability", at);

  const auto& cognitive = field(j, "cognitive", at);
  if (!cognitive.is_array()) schema_error(at, "'cognitive' must be an array");
  for (const auto& jn : cognitive) {
    const std::string nw = at + ".cognitive";
    require_keys_within(jn, {"node_id", "topic_tags", "description", "mastery", "prerequisites"}, nw);
    KnowledgeNode n;
    n.node_id = get_string(jn, "node_id", nw);
    n.topic_tags = get_strings(jn, "topic_tags", nw);
    n.description = jn.contains("description") ? get_string(jn, "description", nw) : "";
    n.mastery = get_fixed(jn, "mastery", nw);
    if (jn.contains("prerequisites")) n.prerequisites = get_strings(jn, "prerequisites", nw);
    p.cognitive.push_back(std::move(n));
  }

  const auto& affective = field(j, "affective", at);
  if (!affective.is_object()) schema_error(at, "'affective' must be an object");
  for (const auto& [key, value] : affective.items()) {
    const auto e = emotion_from_key(key);
    if (!e) schema_error(at + ".affective", "unknown emotion '" + key + "'");
    p.affective[*e] = to_fixed(value, at + ".affective." + key);
  }

  const auto& jb = field(j, "behavioral", at);
  const std::string bw = at + ".behavioral";
  require_keys_within(jb, {"openness_to_feedback", "interests", "social_links"}, bw);
  p.behavioral.openness_to_feedback = get_fixed(jb, "openness_to_feedback", bw);
  if (jb.contains("interests")) p.behavioral.interests = get_strings(jb, "interests", bw);
  if (jb.contains("social_links")) {
    const auto& links = jb.at("social_links");
    if (!links.is_array()) schema_error(bw, "'social_links' must be an array");
    for (const auto& jl : links) {
      require_keys_within(jl, {"peer", "affinity"}, bw + ".social_links");
      p.behavioral.social_links.push_back(
          {get_string(jl, "peer", bw + ".social_links"), get_fixed(jl, "affinity", bw + ".social_links")});
    }
  }

  if (j.contains("modifiers")) {
    const auto& mods = j.at("modifiers");
    if (!mods.is_array()) schema_error(at, "'modifiers' must be an array");
    for (const auto& jr : mods) {
      const std::string rw = at + ".modifiers";
      require_keys_within(jr, {"rule_id", "trigger", "effects", "ttl_turns", "decay"}, rw);
      ModifierRule r;
      r.rule_id = get_string(jr, "rule_id", rw);
      const auto& jt = field(jr, "trigger", rw);
      require_keys_within(jt, {"kind", "target", "near"}, rw + ".trigger");
      const auto kind = get_string(jt, "kind", rw + ".trigger");
      const auto k = event_kind_from_key(kind);
      if (!k) schema_error(rw, "unknown trigger kind '" + kind + "'");
      r.trigger.kind = *k;
      if (jt.contains("target")) {
        const auto t = get_string(jt, "target", rw + ".trigger");
        if (t == "self") r.trigger.target = TargetPredicate::Self;
        else if (t == "others") r.trigger.target = TargetPredicate::Others;
        else if (t == "any") r.trigger.target = TargetPredicate::Any;
        else schema_error(rw, "unknown trigger target '" + t + "'");
      }
      if (jt.contains("near")) {
        if (!jt.at("near").is_boolean()) schema_error(rw, "'near' must be a boolean");
        r.trigger.near = jt.at("near").get<bool>();
      }
      const auto& effects = field(jr, "effects", rw);
      if (!effects.is_array()) schema_error(rw, "'effects' must be an array");
      for (const auto& je : effects) {
        require_keys_within(je, {"path", "delta"}, rw + ".effects");
        const auto path_text = get_string(je, "path", rw + ".effects");
        auto path = ParameterPath::parse(path_text);
        if (!path) schema_error(rw, "unparseable parameter path '" + path_text + "'");
        r.effects.push_back({std::move(*path), get_fixed(je, "delta", rw + ".effects")});
      }
      const auto& ttl = field(jr, "ttl_turns", rw);
      if (!ttl.is_number_integer()) schema_error(rw, "'ttl_turns' must be an integer");
      r.ttl_turns = ttl.get<int>();
      if (jr.contains("decay") && jr.at("decay") != "linear") schema_error(rw, "only 'linear' decay is supported");
      p.modifiers.push_back(std::move(r));
    }
  }
  return p;
}

json roster_to_json(const Roster& r) {
  json students = json::array();
  for (const auto& s : r.students) students.push_back(profile_to_json(s));
  return {{"schema_version", r.schema_version}, {"roster_id", r.roster_id}, {"students", students}};
}

Roster roster_from_json(const json& j) {
  require_keys_within(j, {"schema_version", "roster_id", "students"}, "roster");
  const auto& version = field(j, "schema_version", "roster");
  if (!version.is_number_integer() || version.get<int>() != kRosterSchemaVersion)
    schema_error("roster", "unsupported schema_version (expected " + std::to_string(kRosterSchemaVersion) + ")");
  Roster r;
  r.schema_version = version.get<int>();
  r.roster_id = get_string(j, "roster_id", "roster");
  const auto& students = field(j, "students", "roster");
  if (!students.is_array()) schema_error("roster", "'students' must be an array");
  for (const auto& s : students) r.students.push_back(profile_from_json(s));
  return r;
}

json event_to_json(const TeacherEvent& e) {
  json j = {{"kind", key_name(e.kind)}};
  if (e.target) j["target"] = *e.target;
  if (e.kind == TeacherEventKind::AskQuestion) j["topic_tags"] = e.topic_tags;
  if (e.kind == TeacherEventKind::AskQuestion || e.kind == TeacherEventKind::Instruction || !e.text.empty())
    j["text"] = e.text;
  if (e.kind == TeacherEventKind::Proximity) j["near"] = e.near;
  return j;
}

TeacherEvent event_from_json(const json& j) {
  try {
    require_keys_within(j, {"kind", "target", "topic_tags", "text", "near", "turn"}, "event", ErrorCode::Malformed);
    TeacherEvent e;
    const auto kind = j.at("kind").get<std::string>();
    const auto k = event_kind_from_key(kind);
    if (!k) throw Error(ErrorCode::Malformed, "unknown event kind '" + kind + "'");
    e.kind = *k;
    if (j.contains("target") && !j.at("target").is_null()) e.target = j.at("target").get<std::string>();
    if (j.contains("topic_tags")) e.topic_tags = j.at("topic_tags").get<std::vector<std::string>>();
    if (j.contains("text")) e.text = j.at("text").get<std::string>();
    if (j.contains("near")) e.near = j.at("near").get<bool>();
    if (j.contains("turn")) e.turn = j.at("turn").get<int>();
    check_event_shape(e);
    return e;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::Malformed, std::string("event: ") + ex.what());
  }
}

json instruction_to_json(const BehavioralInstruction& i) {
  json j = {{"action", key_name(i.action)},
            {"confidence_pct", i.confidence_pct},
            {"emotion", key_name(i.emotion)},
            {"tone", key_name(i.tone)},
            {"serialized", serialize_instruction(i)}};
  if (i.contextual_note) j["contextual_note"] = *i.contextual_note;
  return j;
}

BehavioralInstruction instruction_from_json(const json& j) {
  if (!j.is_object() || !j.contains("serialized") || !j.at("serialized").is_string())
    throw Error(ErrorCode::Malformed, "instruction record lacks 'serialized'");
  return parse_instruction(j.at("serialized").get<std::string>());
}

json instance_to_json(const ModifierInstance& m) {
  json current = json::object();
  for (const auto& e : m.current) current[e.path.str()] = fixed_to_json(e.delta);
  return {{"instance_id", m.instance_id},
          {"rule_id", m.rule_id},
          {"created_turn", m.created_turn},
          {"ttl_turns", m.ttl_turns},
          {"remaining_turns", m.remaining_turns},
          {"current", current}};
}

json report_to_json(const ValidationReport& r) {
  json issues = json::array();
  for (const auto& i : r.issues) issues.push_back({{"path", i.path}, {"code", i.code}, {"message", i.message}});
  return {{"ok", r.ok}, {"issues", issues}};
}

}  // namespace slotsim::json_io
