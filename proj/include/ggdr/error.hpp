#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace ggdr {

enum class ErrorKind {
  // validation
  InvalidShape,
  DimensionMismatch,
  NotSquare,
  NotOrthonormal,
  InvalidK,
  DegenerateClass,
  EmptyTrainingSet,
  InvalidGrid,
  InvalidArgument,
  // numerical
  RankDeficient,
  SingularPair,
  SingularR,
  LineSearchFailed,
  NumericalFailure,
  // input/output
  Io,
  Parse,
};

enum class ErrorCategory { Validation, Numerical, Io };

const char* to_string(ErrorKind kind);
ErrorCategory category(ErrorKind kind);

/// Exception type thrown by every ggdr module. The optional sample index
/// names the offending input (sample, or the first sample of a pair).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<std::size_t> sample = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  ErrorCategory category() const noexcept { return ggdr::category(kind_); }
  std::optional<std::size_t> sample() const noexcept { return sample_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> sample_;
};

}  // namespace ggdr
