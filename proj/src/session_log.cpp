#include "slotsim/session_log.hpp"

#include <deque>
#include <fstream>

#include "slotsim/json_io.hpp"

namespace slotsim {
namespace {

using nlohmann::json;

constexpr std::string_view kLogFormat = "slotsim-session-log";
constexpr int kLogVersion = 1;

json header_json(const Session& session) {
  const auto& s = session.state();
  return {{"record", "header"},
          {"format", kLogFormat},
          {"version", kLogVersion},
          {"session_id", s.session_id},
          {"seed", s.rng_seed},
          {"stage", key_name(s.stage)},
          {"performer_backend", session.performer_backend()},
          {"sessions_completed_at_stage", s.sessions_completed_at_stage},
          {"roster", json_io::roster_to_json(s.source_roster)},
          {"config", config_to_json(session.config())}};
}

// Lines after the header, grouped per turn: event, spins, transcript.
std::vector<std::string> body_lines(const SessionState& s) {
  std::vector<std::string> out;
  std::size_t spin_i = 0;
  std::size_t text_i = 0;
  for (const auto& ev : s.events) {
    out.push_back(json{{"record", "event"},
                       {"turn", ev.turn},
                       {"event", json_io::event_to_json(ev.event)},
                       {"instances", ev.instance_ids}}
                      .dump());
    for (; spin_i < s.spins.size() && s.spins[spin_i].turn == ev.turn; ++spin_i) {
      const auto& sp = s.spins[spin_i];
      out.push_back(json{{"record", "spin"},
                         {"turn", sp.turn},
                         {"student_id", sp.student_id},
                         {"seed", sp.seed},
                         {"instruction", serialize_instruction(sp.outcome.instruction)},
                         {"trace", trace_to_json(sp.outcome.trace)}}
                        .dump());
    }
    for (; text_i < s.transcript.size() && s.transcript[text_i].turn == ev.turn; ++text_i)
      out.push_back(transcript_entry_to_json(s.transcript[text_i]).dump());
  }
  return out;
}

// Hands back the utterances recorded in a log, in order, for sessions whose
// original performer cannot be re-run deterministically.
class RecordedPerformer final : public Performer {
public:
  explicit RecordedPerformer(std::deque<Utterance> utterances) : utterances_(std::move(utterances)) {}

  Utterance perform(const PerformerRequest&) override {
    if (utterances_.empty()) throw Error(ErrorCode::BadResponse, "log has no more recorded utterances");
    auto u = std::move(utterances_.front());
    utterances_.pop_front();
    return u;
  }
  [[nodiscard]] std::string_view backend_id() const override { return "recorded"; }

private:
  std::deque<Utterance> utterances_;
};

[[noreturn]] void bad_log(const std::string& what) { throw Error(ErrorCode::SchemaMismatch, "session log: " + what); }

}  // namespace

std::vector<std::string> transcript_lines(const SessionState& state) {
  std::vector<std::string> out;
  out.reserve(state.transcript.size());
  for (const auto& e : state.transcript) out.push_back(transcript_entry_to_json(e).dump());
  return out;
}

std::vector<std::string> session_log_lines(const Session& session) {
  std::vector<std::string> out{header_json(session).dump()};
  auto body = body_lines(session.state());
  out.insert(out.end(), std::make_move_iterator(body.begin()), std::make_move_iterator(body.end()));
  return out;
}

void save_session_log(const Session& session, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write session log '" + path.string() + "'");
  for (const auto& line : session_log_lines(session)) out << line << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed for session log '" + path.string() + "'");
}

ReplayResult replay_session_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open session log '" + path.string() + "'");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) lines.push_back(std::move(line));
  if (lines.empty()) bad_log("empty file");

  json header;
  std::vector<json> records;
  try {
    header = json::parse(lines.front());
    for (std::size_t i = 1; i < lines.size(); ++i) records.push_back(json::parse(lines[i]));
  } catch (const json::exception& ex) {
    bad_log(ex.what());
  }
  if (header.value("record", "") != "header" || header.value("format", "") != kLogFormat ||
      header.value("version", 0) != kLogVersion)
    bad_log("missing or unsupported header");

  SessionConfig config;
  try {
    config.roster = json_io::roster_from_json(header.at("roster"));
    config.simulation = config_from_json(header.at("config"));
    config.seed = header.at("seed").get<std::uint64_t>();
    config.session_id = header.at("session_id").get<std::string>();
    config.sessions_completed_at_stage = header.value("sessions_completed_at_stage", 0);
    const auto stage = stage_from_key(header.at("stage").get<std::string>());
    if (!stage) bad_log("unknown stage");
    config.stage = *stage;

    if (header.at("performer_backend").get<std::string>() == "template") {
      config.performer = std::make_shared<TemplatePerformer>();
    } else {
      std::deque<Utterance> recorded;
      for (const auto& r : records) {
        if (r.at("record") != "transcript" || r.at("speaker") == "teacher") continue;
        Utterance u;
        u.text = r.at("text").get<std::string>();
        if (r.contains("stage_direction")) u.stage_direction = r.at("stage_direction").get<std::string>();
        recorded.push_back(std::move(u));
      }
      config.performer = std::make_shared<RecordedPerformer>(std::move(recorded));
    }
  } catch (const json::exception& ex) {
    bad_log(ex.what());
  }

  Session session(std::move(config));
  for (const auto& r : records) {
    if (r.value("record", "") != "event") continue;
    try {
      session.submit(json_io::event_from_json(r.at("event")));
    } catch (const json::exception& ex) {
      bad_log(ex.what());
    }
  }

  ReplayResult result;
  result.turns = static_cast<std::size_t>(session.state().turn());
  result.transcript = transcript_lines(session.state());
  const auto regenerated = body_lines(session.state());
  const std::vector<std::string> logged(lines.begin() + 1, lines.end());
  result.identical = regenerated == logged;
  if (!result.identical) {
    const std::size_t n = std::min(regenerated.size(), logged.size());
    std::size_t i = 0;
    while (i < n && regenerated[i] == logged[i]) ++i;
    result.mismatch = i < n ? "line " + std::to_string(i + 2) + " differs:\n  logged:   " + logged[i] +
                                  "\n  replayed: " + regenerated[i]
                            : "line count differs (logged " + std::to_string(logged.size()) + ", replayed " +
                                  std::to_string(regenerated.size()) + ")";
  }
  return result;
}

}  // namespace slotsim
