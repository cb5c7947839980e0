#include "slotsim/config.hpp"

#include <cstdlib>
#include <fstream>

#include "slotsim/json_io.hpp"

namespace slotsim {
namespace {

using nlohmann::json;
using json_io::require_keys_within;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::SchemaMismatch, "config: " + what); }

double number(const json& j, const std::string& what) {
  if (!j.is_number()) bad(what + " must be a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& what) {
  if (!j.is_number_integer()) bad(what + " must be an integer");
  return j.get<int>();
}

std::vector<Effect> effects_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) bad(what + " must be an array");
  std::vector<Effect> out;
  for (const auto& e : j) {
    require_keys_within(e, {"path", "delta"}, "config." + what);
    const auto path = ParameterPath::parse(e.at("path").get<std::string>());
    if (!path) bad(what + ": bad parameter path");
    if (!std::holds_alternative<ParameterPath::Affect>(path->target) &&
        !std::holds_alternative<ParameterPath::Openness>(path->target))
      bad(what + ": default effects may only touch affective intensities or openness");
    const auto delta = Fixed4::from_double(number(e.at("delta"), what + ".delta"));
    if (delta.abs() > Fixed4::one()) bad(what + ": |delta| must be <= 1");
    out.push_back({*path, delta});
  }
  return out;
}

json effects_to_json(const std::vector<Effect>& effects) {
  json out = json::array();
  for (const auto& e : effects) out.push_back({{"path", e.path.str()}, {"delta", e.delta.to_double()}});
  return out;
}

StageCaps caps_from_json(const json& j, StageCaps caps, const std::string& what) {
  require_keys_within(j, {"max_volatility", "exaggeration_factor", "allowed_actions", "max_roster_active"},
                      "config." + what);
  if (j.contains("max_volatility")) {
    const auto& v = j.at("max_volatility");
    caps.max_volatility = v.is_null() ? kUnboundedVolatility : number(v, what + ".max_volatility");
    if (caps.max_volatility < 0) bad(what + ".max_volatility must be >= 0");
  }
  if (j.contains("exaggeration_factor")) {
    caps.exaggeration_factor = number(j.at("exaggeration_factor"), what + ".exaggeration_factor");
    if (caps.exaggeration_factor <= 0) bad(what + ".exaggeration_factor must be > 0");
  }
  if (j.contains("allowed_actions")) {
    const auto& a = j.at("allowed_actions");
    if (!a.is_array()) bad(what + ".allowed_actions must be an array");
    ActionSet set;
    for (const auto& name : a) {
      const auto k = action_from_key(name.get<std::string>());
      if (!k) bad(what + ": unknown action '" + name.get<std::string>() + "'");
      set.insert(*k);
    }
    if (!set.contains(ActionKind::AnswerCorrectly)) bad(what + ".allowed_actions must include answer_correctly");
    caps.allowed_actions = set;
  }
  if (j.contains("max_roster_active")) {
    caps.max_roster_active = integer(j.at("max_roster_active"), what + ".max_roster_active");
    if (caps.max_roster_active < 1) bad(what + ".max_roster_active must be positive");
  }
  return caps;
}

json caps_to_json(const StageCaps& c) {
  json actions = json::array();
  for (const auto a : kAllActions)
    if (c.allowed_actions.contains(a)) actions.push_back(key_name(a));
  return {{"max_volatility", std::isinf(c.max_volatility) ? json(nullptr) : json(c.max_volatility)},
          {"exaggeration_factor", c.exaggeration_factor},
          {"allowed_actions", actions},
          {"max_roster_active", c.max_roster_active}};
}

}  // namespace

SimulationConfig config_from_json(const json& j) {
  SimulationConfig c;
  try {
    require_keys_within(j, {"stage_caps", "modifier_defaults", "spin", "peer_influence", "performer", "session"},
                        "config");
    if (j.contains("stage_caps")) {
      const auto& sc = j.at("stage_caps");
      require_keys_within(sc, {"stage1", "stage2", "stage3"}, "config.stage_caps");
      for (const auto s : kAllStages) {
        const std::string key(key_name(s));
        if (sc.contains(key)) c.stage_caps[s] = caps_from_json(sc.at(key), c.stage_caps[s], "stage_caps." + key);
      }
    }
    if (j.contains("modifier_defaults")) {
      const auto& m = j.at("modifier_defaults");
      require_keys_within(m, {"ttl_turns", "compliment", "harsh_critique"}, "config.modifier_defaults");
      if (m.contains("ttl_turns")) {
        c.modifier_defaults.ttl_turns = integer(m.at("ttl_turns"), "modifier_defaults.ttl_turns");
        if (c.modifier_defaults.ttl_turns < 1) bad("modifier_defaults.ttl_turns must be >= 1");
      }
      if (m.contains("compliment"))
        c.modifier_defaults.compliment = effects_from_json(m.at("compliment"), "modifier_defaults.compliment");
      if (m.contains("harsh_critique"))
        c.modifier_defaults.harsh_critique =
            effects_from_json(m.at("harsh_critique"), "modifier_defaults.harsh_critique");
    }
    if (j.contains("spin")) {
      const auto& s = j.at("spin");
      require_keys_within(s, {"failure_weights", "emotion_conditioning", "retrieval_k"}, "config.spin");
      if (s.contains("failure_weights")) {
        const auto& fw = s.at("failure_weights");
        require_keys_within(fw, {"answer_incorrectly", "ask_clarification", "refuse_to_answer", "stay_silent"},
                            "config.spin.failure_weights");
        c.spin.failure_weights.fill(0.0);
        for (const auto& [key, value] : fw.items()) {
          const double w = number(value, "spin.failure_weights." + key);
          if (w < 0) bad("failure weights must be >= 0");
          c.spin.failure_weights[index_of(*action_from_key(key))] = w;
        }
      }
      if (s.contains("emotion_conditioning")) {
        c.spin.emotion_conditioning = number(s.at("emotion_conditioning"), "spin.emotion_conditioning");
        if (c.spin.emotion_conditioning <= 0) bad("spin.emotion_conditioning must be > 0");
      }
      if (s.contains("retrieval_k")) {
        c.spin.retrieval_k = integer(s.at("retrieval_k"), "spin.retrieval_k");
        if (c.spin.retrieval_k < 1) bad("spin.retrieval_k must be >= 1");
      }
    }
    if (j.contains("peer_influence")) {
      const auto& p = j.at("peer_influence");
      require_keys_within(p, {"engagement_threshold", "coupling"}, "config.peer_influence");
      if (p.contains("engagement_threshold"))
        c.peer_influence.engagement_threshold =
            Fixed4::from_double(number(p.at("engagement_threshold"), "peer_influence.engagement_threshold"));
      if (p.contains("coupling"))
        c.peer_influence.coupling = Fixed4::from_double(number(p.at("coupling"), "peer_influence.coupling"));
    }
    if (j.contains("performer")) {
      const auto& p = j.at("performer");
      require_keys_within(p, {"backend", "url", "model", "temperature", "timeout_ms"}, "config.performer");
      if (p.contains("backend")) {
        const auto b = p.at("backend").get<std::string>();
        if (b == "template") c.performer.backend = PerformerBackend::Template;
        else if (b == "external") c.performer.backend = PerformerBackend::External;
        else bad("performer.backend must be 'template' or 'external'");
      }
      if (p.contains("url")) c.performer.url = p.at("url").get<std::string>();
      if (p.contains("model")) c.performer.model = p.at("model").get<std::string>();
      if (p.contains("temperature")) c.performer.temperature = number(p.at("temperature"), "performer.temperature");
      if (p.contains("timeout_ms")) {
        c.performer.timeout_ms = integer(p.at("timeout_ms"), "performer.timeout_ms");
        if (c.performer.timeout_ms < 1) bad("performer.timeout_ms must be positive");
      }
    }
    if (j.contains("session")) {
      const auto& s = j.at("session");
      require_keys_within(s, {"unaddressed_wildcard", "transcript_window"}, "config.session");
      if (s.contains("unaddressed_wildcard")) c.session.unaddressed_wildcard = s.at("unaddressed_wildcard").get<bool>();
      if (s.contains("transcript_window")) {
        c.session.transcript_window = integer(s.at("transcript_window"), "session.transcript_window");
        if (c.session.transcript_window < 0) bad("session.transcript_window must be >= 0");
      }
    }
  } catch (const json::exception& ex) {
    bad(ex.what());
  }
  if (!caps_are_monotone(c.stage_caps)) bad("stage caps must be monotone across stages");
  return c;
}

json config_to_json(const SimulationConfig& c) {
  json caps = json::object();
  for (const auto s : kAllStages) caps[std::string(key_name(s))] = caps_to_json(c.stage_caps[s]);
  json weights = json::object();
  for (const auto a : {ActionKind::AnswerIncorrectly, ActionKind::AskClarification, ActionKind::RefuseToAnswer,
                       ActionKind::StaySilent})
    weights[std::string(key_name(a))] = c.spin.failure_weights[index_of(a)];
  // The API key is deliberately not written out.
  return {{"stage_caps", caps},
          {"modifier_defaults",
           {{"ttl_turns", c.modifier_defaults.ttl_turns},
            {"compliment", effects_to_json(c.modifier_defaults.compliment)},
            {"harsh_critique", effects_to_json(c.modifier_defaults.harsh_critique)}}},
          {"spin",
           {{"failure_weights", weights},
            {"emotion_conditioning", c.spin.emotion_conditioning},
            {"retrieval_k", c.spin.retrieval_k}}},
          {"peer_influence",
           {{"engagement_threshold", c.peer_influence.engagement_threshold.to_double()},
            {"coupling", c.peer_influence.coupling.to_double()}}},
          {"performer",
           {{"backend", c.performer.backend == PerformerBackend::Template ? "template" : "external"},
            {"url", c.performer.url},
            {"model", c.performer.model},
            {"temperature", c.performer.temperature},
            {"timeout_ms", c.performer.timeout_ms}}},
          {"session",
           {{"unaddressed_wildcard", c.session.unaddressed_wildcard},
            {"transcript_window", c.session.transcript_window}}}};
}

SimulationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& ex) {
    bad(std::string("not valid JSON: ") + ex.what());
  }
  return config_from_json(j);
}

PerformerConfig apply_performer_env(PerformerConfig base) {
  if (const char* v = std::getenv("PERFORMER_BACKEND")) {
    const std::string b(v);
    if (b == "template") base.backend = PerformerBackend::Template;
    else if (b == "external") base.backend = PerformerBackend::External;
    else throw Error(ErrorCode::InvalidArgument, "PERFORMER_BACKEND must be 'template' or 'external'");
  }
  if (const char* v = std::getenv("PERFORMER_URL")) base.url = v;
  if (const char* v = std::getenv("PERFORMER_API_KEY")) base.api_key = v;
  if (const char* v = std::getenv("PERFORMER_MODEL")) base.model = v;
  if (const char* v = std::getenv("PERFORMER_TIMEOUT_MS")) {
    try {
      base.timeout_ms = std::stoi(v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "PERFORMER_TIMEOUT_MS must be an integer");
    }
    if (base.timeout_ms < 1) throw Error(ErrorCode::InvalidArgument, "PERFORMER_TIMEOUT_MS must be positive");
  }
  return base;
}

}  // namespace slotsim
