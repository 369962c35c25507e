#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pagerel {

enum class ErrorCode {
  kInvalidArgument,
  // Dataset validation.
  kDuplicateQueryId,
  kBadRankSequence,
  kBadLabelValue,
  kMissingArm,
  kEmptyPage,
  kBadStratum,
  kLabelSourceMismatch,
  // Sampling design.
  kEmptyInput,
  kBudgetTooSmall,
  kMissingSigma,
  kInvalidDesign,
  kStratumExhausted,
  // Estimation.
  kTooFewSamples,
  kTooFewSamplesInStratum,
  kWeightMismatch,
  kNoSegments,
  // Power.
  kOutOfDomain,
  kNonPositiveMean,
  // Multiple testing.
  kBadPValue,
  // Alignment.
  kLengthMismatch,
  kAllTied,
  // Simulator.
  kBadSpec,
  kBadMatrix,
  kInfeasibleTargets,
  // File handling.
  kParseError,
  kIoError,
};

// Stable CamelCase name, used in error JSON and CLI messages.
std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pagerel
