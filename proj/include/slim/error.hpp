#ifndef SLIM_ERROR_HPP
#define SLIM_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace slim {

enum class ErrorCode {
  invalid_input,
  dimension_mismatch,
  invalid_config,
  parse_error,
  cap_exceeded,
  version_error,
  format_limit,
  io_error,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_input: return "invalid_input";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::invalid_config: return "invalid_config";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::cap_exceeded: return "cap_exceeded";
    case ErrorCode::version_error: return "version_error";
    case ErrorCode::format_limit: return "format_limit";
    case ErrorCode::io_error: return "io_error";
  }
  return "unknown";
}

/// Every failure raised by the library carries a stable code so the CLI can
/// print a machine-parseable line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace slim

#endif  // SLIM_ERROR_HPP
