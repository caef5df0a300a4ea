#pragma once

#include <stdexcept>
#include <string>

namespace panfuse {

enum class ErrorCode {
  invalid_argument,
  io,
  parse,
  degenerate_input,
  unsupported,
  numeric,
  insufficient_data,
};

const char* error_code_name(ErrorCode code);

/// Single exception type for the whole library; the code survives the
/// extern-C boundary as a status value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace panfuse
