#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fusekit {

enum class ErrorKind {
  ingest,      // malformed label/prediction file content
  alignment,   // sample sets or model ids do not line up
  domain,      // argument outside an operation's domain
  fusion,      // weight or strategy configuration problems
  simulation,  // infeasible simulator spec
  usage,       // bad command-line usage
  io,          // filesystem failures
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ingest: return "ingest";
    case ErrorKind::alignment: return "alignment";
    case ErrorKind::domain: return "domain";
    case ErrorKind::fusion: return "fusion";
    case ErrorKind::simulation: return "simulation";
    case ErrorKind::usage: return "usage";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library. `kind()` is the stable,
/// machine-readable part; `what()` is the human-readable reason.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fusekit
