#include "cinediff/error.hpp"

namespace cinediff {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::InfeasibleSpec: return "InfeasibleSpec";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::DtypeMismatch: return "DtypeMismatch";
    case ErrorKind::DegenerateShape: return "DegenerateShape";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::Truncated: return "Truncated";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::IncompleteCoverage: return "IncompleteCoverage";
    case ErrorKind::AmbiguousContributor: return "AmbiguousContributor";
    case ErrorKind::InfeasibleWindow: return "InfeasibleWindow";
    case ErrorKind::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorKind::ScheduleOrderViolation: return "ScheduleOrderViolation";
    case ErrorKind::EmptyBatch: return "EmptyBatch";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::WindowTooLarge: return "WindowTooLarge";
    case ErrorKind::RankTooLarge: return "RankTooLarge";
    case ErrorKind::NonPositiveLambda: return "NonPositiveLambda";
    case ErrorKind::MissingModel: return "MissingModel";
    case ErrorKind::ModelRoleMismatch: return "ModelRoleMismatch";
    case ErrorKind::ImageTooSmall: return "ImageTooSmall";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void Result::require() const {
  if (!ok) throw Error(kind, message);
}

}  // namespace cinediff
