#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slotsim/config.hpp"
#include "slotsim/instruction.hpp"

namespace slotsim {

struct TranscriptEntry {
  int turn = 0;
  std::string speaker;
  std::string text;
  std::optional<std::string> stage_direction;
  std::optional<BehavioralInstruction> instruction;

  friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

struct PerformerRequest {
  BehavioralInstruction instruction;
  std::string persona_blurb;
  std::vector<TranscriptEntry> transcript;  // most recent last
  std::optional<std::string> answer;        // present iff the action is AnswerCorrectly/AnswerIncorrectly
};

struct Utterance {
  std::string text;
  std::optional<std::string> stage_direction;
  std::string backend_id;
  double latency_ms = 0.0;
};

// Throws INVALID_ARGUMENT when the answer text does not match the action.
void check_request(const PerformerRequest& req);

class Performer {
public:
  virtual ~Performer() = default;
  virtual Utterance perform(const PerformerRequest& req) = 0;
  [[nodiscard]] virtual std::string_view backend_id() const = 0;
};

// Deterministic (action, tone) phrase table; never fails.
class TemplatePerformer final : public Performer {
public:
  Utterance perform(const PerformerRequest& req) override;
  [[nodiscard]] std::string_view backend_id() const override { return "template"; }
};

// Off-by-one for integer answers; nullopt when the answer is not an integer.
std::optional<std::string> perturb_answer(std::string_view answer);

// Prompt for a chat model: persona, the canonical instruction, the transcript
// excerpt, and a directive to perform the instruction rather than reason about it.
std::string build_prompt(const PerformerRequest& req);

struct HttpRequest {
  std::string url;
  std::string body;
  std::map<std::string, std::string> headers;
  int timeout_ms = 5000;
};

struct HttpResult {
  enum class Transport { Ok, Unreachable, Timeout };
  Transport transport = Transport::Ok;
  int status = 0;
  std::string body;
  std::string error;
};

class HttpTransport {
public:
  virtual ~HttpTransport() = default;
  virtual HttpResult post(const HttpRequest& req) = 0;
};

// cpp-httplib backed transport (plain http only).
class HttplibTransport final : public HttpTransport {
public:
  HttpResult post(const HttpRequest& req) override;
};

// Calls a chat-completion endpoint once, retrying once on transport failure
// or a 5xx/429 status. Throws BACKEND_UNREACHABLE, TIMEOUT or BAD_RESPONSE.
class ExternalPerformer final : public Performer {
public:
  ExternalPerformer(PerformerConfig config, std::shared_ptr<HttpTransport> transport);

  Utterance perform(const PerformerRequest& req) override;
  [[nodiscard]] std::string_view backend_id() const override { return "external"; }

  [[nodiscard]] std::string request_body(const PerformerRequest& req) const;

private:
  PerformerConfig config_;
  std::shared_ptr<HttpTransport> transport_;
};

std::shared_ptr<Performer> make_performer(const PerformerConfig& config);

}  // namespace slotsim
