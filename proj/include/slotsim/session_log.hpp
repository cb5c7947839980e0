#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "slotsim/session.hpp"

namespace slotsim {

// Newline-delimited JSON: a header (roster, config, stage, seed), then per
// turn the event record, spin traces and transcript lines.
std::vector<std::string> session_log_lines(const Session& session);
void save_session_log(const Session& session, const std::filesystem::path& path);

// Just the transcript records, one JSON document per line.
std::vector<std::string> transcript_lines(const SessionState& state);

struct ReplayResult {
  bool identical = false;
  std::size_t turns = 0;
  std::vector<std::string> transcript;  // regenerated transcript lines
  std::string mismatch;                 // first difference, empty when identical
};

// Re-runs every logged event from the logged roster, config and seed and
// compares the regenerated transcript and spin records with the log.
// Throws IO or SCHEMA_MISMATCH.
ReplayResult replay_session_log(const std::filesystem::path& path);

}  // namespace slotsim
