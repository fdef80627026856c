#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace affine {

/// Error taxonomy shared by every module. The CLI maps kinds to exit codes.
enum class ErrorKind {
  invalid_argument,
  unsupported_body,
  unsupported_scheme,
  unsupported,
  numeric_failure,
  degenerate_input,
  optimization_failure,
  usage,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::unsupported_body: return "unsupported-body";
    case ErrorKind::unsupported_scheme: return "unsupported-scheme";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::numeric_failure: return "numeric-failure";
    case ErrorKind::degenerate_input: return "degenerate-input";
    case ErrorKind::optimization_failure: return "optimization-failure";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace affine
