#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "slotsim/modifiers.hpp"
#include "slotsim/spin.hpp"
#include "slotsim/stage.hpp"

namespace slotsim {

enum class PerformerBackend { Template, External };

struct PerformerConfig {
  PerformerBackend backend = PerformerBackend::Template;
  std::string url;      // http://host:port/path of a chat-completion endpoint
  std::string api_key;  // sent as a Bearer token when non-empty
  std::string model = "gpt-4o-mini";
  double temperature = 0.7;
  int timeout_ms = 5000;
};

struct SessionOptions {
  bool unaddressed_wildcard = false;
  int transcript_window = 6;
};

struct SimulationConfig {
  StageCapsTable stage_caps = StageCapsTable::defaults();
  ModifierDefaults modifier_defaults;
  SpinConfig spin;
  PeerInfluenceConfig peer_influence;
  PerformerConfig performer;
  SessionOptions session;
};

// Every key is optional; unknown keys are rejected with SCHEMA_MISMATCH.
SimulationConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SimulationConfig& c);
SimulationConfig load_config(const std::filesystem::path& path);

// Overlays PERFORMER_BACKEND, PERFORMER_URL, PERFORMER_API_KEY,
// PERFORMER_MODEL and PERFORMER_TIMEOUT_MS when set.
PerformerConfig apply_performer_env(PerformerConfig base);

}  // namespace slotsim
