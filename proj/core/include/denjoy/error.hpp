#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace denjoy {

enum class ErrorCode {
  InvalidArgument,
  SingularMatrix,
  DimensionMismatch,
  NonSPDInput,
  OrientationReversing,
  NonFinite,
  BudgetExceeded,
  TailTooLarge,
  InfeasibleWindow,
  RationalOrbit,
  NotInSystem,
  WindowEdge,
  OutsideBall,
  DegenerateSamples,
  NotDisjoint,
  UndefinedAtSample,
  IncompleteEvidence,
  MalformedRecord,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace denjoy
