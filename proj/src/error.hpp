#pragma once

#include <stdexcept>
#include <string>

namespace relaylock {

enum class ErrorCode {
  InvalidArgument,
  Config,
  NoOscillation,
  NoSolution,
  Degenerate,
  Numeric,
  Validation,
  Io,
};

// Every failure raised by the core carries a code so the C boundary can map
// it onto a status value without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace relaylock
