#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace slotsim {

enum class ErrorCode {
  Io,
  SchemaMismatch,
  Validation,
  UnknownPath,
  EmptyContext,
  NoFallback,
  Malformed,
  UnknownEnum,
  Range,
  UnknownTarget,
  UnknownSession,
  BackendUnreachable,
  Timeout,
  BadResponse,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

struct ValidationIssue {
  std::string path;
  std::string code;
  std::string message;

  friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

struct ValidationReport {
  bool ok = true;
  std::vector<ValidationIssue> issues;

  void add(std::string path, std::string code, std::string message) {
    issues.push_back({std::move(path), std::move(code), std::move(message)});
    ok = false;
  }
  [[nodiscard]] bool has(std::string_view code) const {
    for (const auto& i : issues)
      if (i.code == code) return true;
    return false;
  }
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}
  Error(ErrorCode code, const std::string& message, ValidationReport report)
      : Error(code, message) {
    report_ = std::move(report);
  }

  [[nodiscard]] ErrorCode code() const { return code_; }
  [[nodiscard]] const std::optional<ValidationReport>& report() const { return report_; }

private:
  ErrorCode code_;
  std::optional<ValidationReport> report_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return "IO";
    case ErrorCode::SchemaMismatch: return "SCHEMA_MISMATCH";
    case ErrorCode::Validation: return "VALIDATION";
    case ErrorCode::UnknownPath: return "UNKNOWN_PATH";
    case ErrorCode::EmptyContext: return "EMPTY_CONTEXT";
    case ErrorCode::NoFallback: return "NO_FALLBACK";
    case ErrorCode::Malformed: return "MALFORMED";
    case ErrorCode::UnknownEnum: return "UNKNOWN_ENUM";
    case ErrorCode::Range: return "RANGE";
    case ErrorCode::UnknownTarget: return "UNKNOWN_TARGET";
    case ErrorCode::UnknownSession: return "UNKNOWN_SESSION";
    case ErrorCode::BackendUnreachable: return "BACKEND_UNREACHABLE";
    case ErrorCode::Timeout: return "TIMEOUT";
    case ErrorCode::BadResponse: return "BAD_RESPONSE";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
  }
  return "UNKNOWN";
}

}  // namespace slotsim
