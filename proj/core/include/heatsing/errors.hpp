#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace heatsing {

enum class ErrorKind {
  InvalidArgument,
  NegativeEigenvalue,
  OutOfDomain,
  GridTooCoarse,
  NonpositiveTime,
  ToleranceNotMet,
  AtSingularPoint,
  UnsupportedInitialData,
  DegenerateWindow,
  NonpositiveMass,
  GridMismatch,
  AlphaOutOfRange,
  EnsembleTooSmall,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

// Every numerical failure in the library surfaces as this exception type;
// callers branch on kind() rather than on the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace heatsing
