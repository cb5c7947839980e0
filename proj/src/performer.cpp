#include "slotsim/performer.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <charconv>

#include <httplib.h>
#include <json.hpp>

#include "slotsim/error.hpp"

namespace slotsim {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
}

struct Phrase {
  ToneTag tone;
  std::string_view text;
};

// Tone-specific phrasings per action; anything missing uses the action's fallback.
struct ActionPhrases {
  std::string_view fallback;
  std::vector<Phrase> by_tone;
};

const ActionPhrases& phrases_for(ActionKind a) {
  using enum ToneTag;
  static const std::array<ActionPhrases, kActionCount> table = {{
      // AnswerCorrectly
      {"It's {answer}.",
       {{Eager, "It's {answer}! I got this!"},
        {Confident, "{answer}. That one's easy."},
        {Attentive, "I think it's {answer}."},
        {Hesitant, "Um... is it {answer}?"},
        {Quiet, "...{answer}."},
        {Curt, "{answer}."},
        {Flat, "{answer}, I guess."},
        {Sharp, "It's {answer}, obviously."},
        {Inquisitive, "It's {answer}, right? Why does that work?"},
        {Animated, "Ooh! {answer}! It's {answer}!"}}},
      // AnswerIncorrectly
      {"Is it {wrong}?",
       {{Eager, "It's {wrong}! I got this!"},
        {Confident, "{wrong}. Easy."},
        {Hesitant, "Um... is it {wrong}?"},
        {Quiet, "...{wrong}?"},
        {Curt, "{wrong}."},
        {Sharp, "It's {wrong}. Can we move on?"},
        {Animated, "Ooh! {wrong}!"}}},
      // AskClarification
      {"Wait, can you explain that again?",
       {{Hesitant, "Um, I don't really get it. Can you go over it again?"},
        {Inquisitive, "Why does it work like that?"},
        {Sharp, "This doesn't make any sense."},
        {Quiet, "...can you say that again?"},
        {Eager, "Ooh, can you show us another example?"}}},
      // RefuseToAnswer
      {"I don't want to answer that.",
       {{Curt, "No."}, {Sharp, "Why do I always have to answer?"}, {Quiet, "...pass."}, {Flat, "Pass."}}},
      // OffTaskRemark
      {"Did anyone see the game last night?",
       {{Animated, "Oh! Guess what happened at lunch!"},
        {Flat, "This is so boring."},
        {Sharp, "Can we just be done already?"}}},
      // StaySilent
      {"", {}},
  }};
  return table[index_of(a)];
}

std::string phrase(ActionKind action, ToneTag tone) {
  const auto& p = phrases_for(action);
  for (const auto& entry : p.by_tone)
    if (entry.tone == tone) return std::string(entry.text);
  return std::string(p.fallback);
}

// Extracts "<interest>" from "Use <interest> analogy if applicable".
std::optional<std::string> note_interest(const std::optional<std::string>& note) {
  constexpr std::string_view kPrefix = "Use ";
  constexpr std::string_view kSuffix = " analogy if applicable";
  if (!note || !note->starts_with(kPrefix) || !note->ends_with(kSuffix)) return std::nullopt;
  return note->substr(kPrefix.size(), note->size() - kPrefix.size() - kSuffix.size());
}

std::string describe_turn(const TranscriptEntry& e) {
  std::string line = e.speaker + ": ";
  line += e.text.empty() && e.stage_direction ? *e.stage_direction : e.text;
  return line;
}

struct ParsedUrl {
  std::string origin;  // scheme://host:port
  std::string path;
};

std::optional<ParsedUrl> parse_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) return std::nullopt;
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  out.origin = std::string(url.substr(0, path_start));
  out.path = path_start == std::string_view::npos ? "/" : std::string(url.substr(path_start));
  return out;
}

bool retryable(const HttpResult& r) {
  return r.transport != HttpResult::Transport::Ok || r.status >= 500 || r.status == 429;
}

}  // namespace

void check_request(const PerformerRequest& req) {
  const bool answers =
      req.instruction.action == ActionKind::AnswerCorrectly || req.instruction.action == ActionKind::AnswerIncorrectly;
  if (answers != req.answer.has_value())
    throw Error(ErrorCode::InvalidArgument, answers ? "answer text required for answer actions"
                                                    : "answer text only accompanies answer actions");
}

std::optional<std::string> perturb_answer(std::string_view answer) {
  long long n = 0;
  const auto [ptr, ec] = std::from_chars(answer.data(), answer.data() + answer.size(), n);
  if (ec != std::errc() || ptr != answer.data() + answer.size()) return std::nullopt;
  return std::to_string(n + 1);
}

Utterance TemplatePerformer::perform(const PerformerRequest& req) {
  const auto start = Clock::now();
  check_request(req);
  const auto& ins = req.instruction;
  Utterance out;
  out.backend_id = std::string(backend_id());

  switch (ins.action) {
    case ActionKind::StaySilent:
      out.stage_direction = "[stays quiet]";
      break;
    case ActionKind::OffTaskRemark:
      if (const auto interest = note_interest(ins.contextual_note))
        out.text = "Can we talk about " + *interest + " instead?";
      else
        out.text = phrase(ins.action, ins.tone);
      out.stage_direction = "[turns to a classmate]";
      break;
    case ActionKind::AnswerIncorrectly: {
      if (const auto wrong = perturb_answer(*req.answer)) {
        out.text = phrase(ins.action, ins.tone);
        replace_all(out.text, "{wrong}", *wrong);
      } else {
        out.text = "I always mix this one up... is it the other one?";
      }
      break;
    }
    default:
      out.text = phrase(ins.action, ins.tone);
      if (req.answer) replace_all(out.text, "{answer}", *req.answer);
      break;
  }
  out.latency_ms = elapsed_ms(start);
  return out;
}

std::string build_prompt(const PerformerRequest& req) {
  const auto& ins = req.instruction;
  std::string p;
  p += "You are voice-acting a student in a classroom simulation.\n\n";
  p += "Persona:\n" + req.persona_blurb + "\n\n";
  p += "Behavioral instruction:\n" + serialize_instruction(ins) + "\n\n";
  p += "Recent transcript:\n";
  for (const auto& e : req.transcript) p += describe_turn(e) + "\n";
  p += "\n";
  p += "Perform this instruction exactly as written. Do not reason about whether it is right, and do not "
       "change the action, emotion or tone. Reply with the student's spoken line only.\n";
  if (ins.action == ActionKind::AnswerCorrectly && req.answer)
    p += "The answer the student gives is: " + *req.answer + "\n";
  if (ins.action == ActionKind::AnswerIncorrectly && req.answer)
    p += "The correct answer is " + *req.answer +
         ". The student must instead give a plausible wrong answer close to it, the kind of mistake a real "
         "student makes.\n";
  if (ins.action == ActionKind::StaySilent) p += "The student says nothing; reply with an empty line.\n";
  return p;
}

HttpResult HttplibTransport::post(const HttpRequest& req) {
  HttpResult out;
  const auto url = parse_url(req.url);
  if (!url || !url->origin.starts_with("http://")) {
    out.transport = HttpResult::Transport::Unreachable;
    out.error = "unsupported or malformed URL '" + req.url + "' (plain http only)";
    return out;
  }
  httplib::Client client(url->origin);
  const auto sec = req.timeout_ms / 1000;
  const auto usec = (req.timeout_ms % 1000) * 1000;
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);
  httplib::Headers headers;
  for (const auto& [k, v] : req.headers) headers.emplace(k, v);

  const auto res = client.Post(url->path, headers, req.body, "application/json");
  if (!res) {
    const auto err = res.error();
    out.error = httplib::to_string(err);
    // httplib reports an expired read timeout as a read error.
    out.transport = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
                        ? HttpResult::Transport::Timeout
                        : HttpResult::Transport::Unreachable;
    return out;
  }
  out.status = res->status;
  out.body = res->body;
  return out;
}

ExternalPerformer::ExternalPerformer(PerformerConfig config, std::shared_ptr<HttpTransport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {}

std::string ExternalPerformer::request_body(const PerformerRequest& req) const {
  const nlohmann::json body = {
      {"model", config_.model},
      {"temperature", config_.temperature},
      {"messages",
       nlohmann::json::array({{{"role", "system"}, {"content", "You perform classroom student lines."}},
                              {{"role", "user"}, {"content", build_prompt(req)}}})},
  };
  return body.dump();
}

Utterance ExternalPerformer::perform(const PerformerRequest& req) {
  const auto start = Clock::now();
  check_request(req);
  HttpRequest http;
  http.url = config_.url;
  http.body = request_body(req);
  http.timeout_ms = config_.timeout_ms;
  http.headers["Content-Type"] = "application/json";
  if (!config_.api_key.empty()) http.headers["Authorization"] = "Bearer " + config_.api_key;

  HttpResult res = transport_->post(http);
  if (retryable(res)) res = transport_->post(http);

  if (res.transport == HttpResult::Transport::Unreachable)
    throw Error(ErrorCode::BackendUnreachable, "performer endpoint unreachable: " + res.error);
  if (res.transport == HttpResult::Transport::Timeout)
    throw Error(ErrorCode::Timeout, "performer endpoint timed out: " + res.error);
  if (res.status < 200 || res.status >= 300)
    throw Error(ErrorCode::BadResponse, "performer endpoint returned HTTP " + std::to_string(res.status));

  Utterance out;
  try {
    const auto j = nlohmann::json::parse(res.body);
    out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::BadResponse, std::string("unexpected completion payload: ") + ex.what());
  }
  if (req.instruction.action == ActionKind::StaySilent) {
    out.text.clear();
    out.stage_direction = "[stays quiet]";
  }
  out.backend_id = std::string(backend_id());
  out.latency_ms = elapsed_ms(start);
  return out;
}

std::shared_ptr<Performer> make_performer(const PerformerConfig& config) {
  if (config.backend == PerformerBackend::External) {
    if (config.url.empty()) throw Error(ErrorCode::InvalidArgument, "external performer needs PERFORMER_URL");
    return std::make_shared<ExternalPerformer>(config, std::make_shared<HttplibTransport>());
  }
  return std::make_shared<TemplatePerformer>();
}

}  // namespace slotsim
