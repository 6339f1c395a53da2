#include "denjoy/error.hpp"

namespace denjoy {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonSPDInput: return "NonSPDInput";
    case ErrorCode::OrientationReversing: return "OrientationReversing";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::TailTooLarge: return "TailTooLarge";
    case ErrorCode::InfeasibleWindow: return "InfeasibleWindow";
    case ErrorCode::RationalOrbit: return "RationalOrbit";
    case ErrorCode::NotInSystem: return "NotInSystem";
    case ErrorCode::WindowEdge: return "WindowEdge";
    case ErrorCode::OutsideBall: return "OutsideBall";
    case ErrorCode::DegenerateSamples: return "DegenerateSamples";
    case ErrorCode::NotDisjoint: return "NotDisjoint";
    case ErrorCode::UndefinedAtSample: return "UndefinedAtSample";
    case ErrorCode::IncompleteEvidence: return "IncompleteEvidence";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace denjoy
