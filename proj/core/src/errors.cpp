#include "heatsing/errors.hpp"

namespace heatsing {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::NonpositiveTime: return "NonpositiveTime";
    case ErrorKind::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorKind::AtSingularPoint: return "AtSingularPoint";
    case ErrorKind::UnsupportedInitialData: return "UnsupportedInitialData";
    case ErrorKind::DegenerateWindow: return "DegenerateWindow";
    case ErrorKind::NonpositiveMass: return "NonpositiveMass";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorKind::EnsembleTooSmall: return "EnsembleTooSmall";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace heatsing
