#include "soqbt/errors.hpp"

namespace soqbt {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::SingularPencil: return "SingularPencil";
    case ErrorKind::UnsupportedDamping: return "UnsupportedDamping";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::InvalidRange: return "InvalidRange";
    case ErrorKind::UnstablePencil: return "UnstablePencil";
    case ErrorKind::IllConditionedEigenvectors: return "IllConditionedEigenvectors";
    case ErrorKind::HypothesisViolation: return "HypothesisViolation";
    case ErrorKind::MissingSplitSamples: return "MissingSplitSamples";
    case ErrorKind::MissingDerivative: return "MissingDerivative";
    case ErrorKind::NotConjugateSymmetric: return "NotConjugateSymmetric";
    case ErrorKind::ZeroWeight: return "ZeroWeight";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingularReducedPencil: return "SingularReducedPencil";
    case ErrorKind::ZeroReference: return "ZeroReference";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
  }
  return "Unknown";
}

}  // namespace soqbt
