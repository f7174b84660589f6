#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace nsa {

// Every failure the engine can diagnose carries a stable machine-readable code
// (used by tests and by the CLI's error reporting) plus a human-readable detail
// string. Codes are CamelCase identifiers, e.g. "TypeMismatch", "NotInFragment".
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& detail)
      : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

private:
  std::string code_;
};

[[noreturn]] inline void fail(std::string code, const std::string& detail) {
  throw Error(std::move(code), detail);
}

}  // namespace nsa
