#pragma once

#include <stdexcept>
#include <string>

namespace rpid {

enum class ErrorCode {
  // graph
  CycleDetected,
  UnknownVariableInEdge,
  MissingProtected,
  MissingTarget,
  TargetHasChildren,
  DuplicateVariable,
  ProtectedNotBinary,
  TargetNotBinary,
  NoPathToTarget,
  // glm
  SeparationDetected,
  SingularDesign,
  InvalidResponse,
  TooFewRows,
  DimensionMismatch,
  // warp
  EmptyPool,
  GroupTooSmall,
  MissingFeature,
  GroupLevelError,
  // stats / evaluation
  TooFewObservations,
  InvalidArgs,
  ZeroVariance,
  LengthMismatch,
  ConstantInput,
  MissingFindWorld,
  EmptyGroup,
  // pipeline
  SchemaMismatch,
  ConfigError,
  IoError,
  InvalidConfig,
  BundleVersionMismatch,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rpid
