#pragma once

#include <stdexcept>
#include <string>

namespace pup {

enum class ErrorCode {
  invalid_argument,
  io,
  parse,
  diverged,
  mismatch,
  internal,
};

class PupError : public std::runtime_error {
 public:
  PupError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw PupError(code, message);
}

}  // namespace pup
