#include "slotsim/instruction.hpp"

#include <cctype>
#include <charconv>
#include <vector>

#include "slotsim/error.hpp"

namespace slotsim {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Returns the value of a "Key: value" segment, or throws MALFORMED.
std::string_view segment_value(std::string_view segment, std::string_view key) {
  segment = trim(segment);
  const auto colon = segment.find(':');
  if (colon == std::string_view::npos || trim(segment.substr(0, colon)) != key)
    throw Error(ErrorCode::Malformed, "expected segment '" + std::string(key) + "'");
  const auto value = trim(segment.substr(colon + 1));
  if (value.empty()) throw Error(ErrorCode::Malformed, "empty value for '" + std::string(key) + "'");
  return value;
}

template <typename E>
E require_enum(std::optional<E> parsed, std::string_view what, std::string_view value) {
  if (!parsed) throw Error(ErrorCode::UnknownEnum, "unrecognized " + std::string(what) + " '" + std::string(value) + "'");
  return *parsed;
}

}  // namespace

std::string serialize_instruction(const BehavioralInstruction& i) {
  std::string out = "[Action: ";
  out += display_name(i.action);
  out += "; Confidence: " + std::to_string(i.confidence_pct) + "%";
  out += "; Emotion: ";
  out += display_name(i.emotion);
  out += "; Tone: ";
  out += display_name(i.tone);
  if (i.contextual_note) out += "; Contextual_Note: " + *i.contextual_note;
  out += "]";
  return out;
}

BehavioralInstruction parse_instruction(std::string_view text) {
  text = trim(text);
  if (text.size() < 2 || text.front() != '[' || text.back() != ']')
    throw Error(ErrorCode::Malformed, "instruction must be enclosed in brackets");
  std::string_view inner = text.substr(1, text.size() - 2);

  // The note is last and may itself contain ';', so split at most four times.
  std::vector<std::string_view> parts;
  while (parts.size() < 4) {
    const auto semi = inner.find(';');
    if (semi == std::string_view::npos) break;
    parts.push_back(inner.substr(0, semi));
    inner.remove_prefix(semi + 1);
  }
  parts.push_back(inner);
  if (parts.size() < 4) throw Error(ErrorCode::Malformed, "missing required segments");

  const auto action_text = segment_value(parts[0], "Action");
  const auto confidence_text = segment_value(parts[1], "Confidence");
  const auto emotion_text = segment_value(parts[2], "Emotion");
  const auto tone_text = segment_value(parts[3], "Tone");

  BehavioralInstruction out;
  if (parts.size() == 5) out.contextual_note = std::string(segment_value(parts[4], "Contextual_Note"));

  if (confidence_text.back() != '%') throw Error(ErrorCode::Malformed, "confidence must end with '%'");
  const auto digits = trim(confidence_text.substr(0, confidence_text.size() - 1));
  int confidence = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), confidence);
  if (ec == std::errc::result_out_of_range) throw Error(ErrorCode::Range, "confidence out of range");
  if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty())
    throw Error(ErrorCode::Malformed, "confidence is not an integer");

  out.action = require_enum(action_from_display(action_text), "action", action_text);
  out.emotion = require_enum(emotion_from_display(emotion_text), "emotion", emotion_text);
  out.tone = require_enum(tone_from_display(tone_text), "tone", tone_text);
  if (confidence < 0 || confidence > 100)
    throw Error(ErrorCode::Range, "confidence " + std::to_string(confidence) + "% outside 0-100");
  out.confidence_pct = confidence;
  return out;
}

}  // namespace slotsim
