#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace afi {

/// Failure categories. The CLI maps each kind to an exit code.
enum class ErrorKind {
  input,         // unknown state/event, malformed argument
  model,         // syntax, determinism, attribute conflicts
  config,        // unusable configuration (e.g. no fault types)
  assumption,    // plant violates A1-A3
  precondition,  // operation called outside its domain (e.g. not diagnosable)
  resource,      // state caps exceeded
  synthesis,     // no valid supervisor, integrity violations
  protocol,      // runtime observation contradicts the issued decision
  scheduler,     // simulator asked to fire an inadmissible event
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::input: return "input";
    case ErrorKind::model: return "model";
    case ErrorKind::config: return "config";
    case ErrorKind::assumption: return "assumption";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::resource: return "resource";
    case ErrorKind::synthesis: return "synthesis";
    case ErrorKind::protocol: return "protocol";
    case ErrorKind::scheduler: return "scheduler";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace afi
