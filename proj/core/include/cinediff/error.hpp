#pragma once

#include <stdexcept>
#include <string>

namespace cinediff {

enum class ErrorKind {
  InvalidArgument,
  InvalidSpec,
  InfeasibleSpec,
  ShapeMismatch,
  DomainMismatch,
  DtypeMismatch,
  DegenerateShape,
  NonFiniteValue,
  BadMagic,
  Truncated,
  IoFailure,
  IncompleteCoverage,
  AmbiguousContributor,
  InfeasibleWindow,
  NonPositiveSigma,
  ScheduleOrderViolation,
  EmptyBatch,
  EmptyDataset,
  Diverged,
  WindowTooLarge,
  RankTooLarge,
  NonPositiveLambda,
  MissingModel,
  ModelRoleMismatch,
  ImageTooSmall,
};

const char* to_string(ErrorKind kind);

/// All recoverable failures are reported through this type so callers can
/// branch on kind() without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Validation outcome for checks that should not throw.
struct Result {
  bool ok = true;
  ErrorKind kind = ErrorKind::InvalidArgument;
  std::string message;

  static Result success() { return {}; }
  static Result failure(ErrorKind kind, std::string message) {
    return {false, kind, std::move(message)};
  }
  explicit operator bool() const { return ok; }
  /// Throws Error(kind, message) if not ok.
  void require() const;
};

}  // namespace cinediff
