#include "ggdr/error.hpp"

namespace ggdr {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidShape: return "InvalidShape";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::NotOrthonormal: return "NotOrthonormal";
    case ErrorKind::InvalidK: return "InvalidK";
    case ErrorKind::DegenerateClass: return "DegenerateClass";
    case ErrorKind::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorKind::InvalidGrid: return "InvalidGrid";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::SingularPair: return "SingularPair";
    case ErrorKind::SingularR: return "SingularR";
    case ErrorKind::LineSearchFailed: return "LineSearchFailed";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

ErrorCategory category(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::RankDeficient:
    case ErrorKind::SingularPair:
    case ErrorKind::SingularR:
    case ErrorKind::LineSearchFailed:
    case ErrorKind::NumericalFailure:
      return ErrorCategory::Numerical;
    case ErrorKind::Io:
    case ErrorKind::Parse:
      return ErrorCategory::Io;
    default:
      return ErrorCategory::Validation;
  }
}

Error::Error(ErrorKind kind, const std::string& what,
             std::optional<std::size_t> sample)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what),
      kind_(kind),
      sample_(sample) {}

}  // namespace ggdr
