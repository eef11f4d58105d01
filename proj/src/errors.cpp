#include "rpid/errors.hpp"

namespace rpid {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::UnknownVariableInEdge: return "UnknownVariableInEdge";
    case ErrorCode::MissingProtected: return "MissingProtected";
    case ErrorCode::MissingTarget: return "MissingTarget";
    case ErrorCode::TargetHasChildren: return "TargetHasChildren";
    case ErrorCode::DuplicateVariable: return "DuplicateVariable";
    case ErrorCode::ProtectedNotBinary: return "ProtectedNotBinary";
    case ErrorCode::TargetNotBinary: return "TargetNotBinary";
    case ErrorCode::NoPathToTarget: return "NoPathToTarget";
    case ErrorCode::SeparationDetected: return "SeparationDetected";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::InvalidResponse: return "InvalidResponse";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyPool: return "EmptyPool";
    case ErrorCode::GroupTooSmall: return "GroupTooSmall";
    case ErrorCode::MissingFeature: return "MissingFeature";
    case ErrorCode::GroupLevelError: return "GroupLevelError";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::InvalidArgs: return "InvalidArgs";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ConstantInput: return "ConstantInput";
    case ErrorCode::MissingFindWorld: return "MissingFindWorld";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::BundleVersionMismatch: return "BundleVersionMismatch";
  }
  return "UnknownError";
}

}  // namespace rpid
