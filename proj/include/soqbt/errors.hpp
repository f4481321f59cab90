#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace soqbt {

/// Failure categories raised by the library. The CLI maps these onto exit codes.
enum class ErrorKind {
  DivisionByZero,
  DomainError,
  SingularPencil,
  UnsupportedDamping,
  InvalidParams,
  InvalidRange,
  UnstablePencil,
  IllConditionedEigenvectors,
  HypothesisViolation,
  MissingSplitSamples,
  MissingDerivative,
  NotConjugateSymmetric,
  ZeroWeight,
  RankDeficient,
  DimensionMismatch,
  SingularReducedPencil,
  ZeroReference,
  FormatError,
  VersionMismatch,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Pencil solve failure carrying the index of the offending node, or -1 if the
/// evaluation point was not part of a node list.
class SingularPencilError : public Error {
 public:
  SingularPencilError(const std::string& what, long node_index = -1)
      : Error(ErrorKind::SingularPencil, what), node_index_(node_index) {}

  long node_index() const noexcept { return node_index_; }

 private:
  long node_index_;
};

}  // namespace soqbt
