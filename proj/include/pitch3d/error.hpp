#pragma once

#include <stdexcept>
#include <string>

namespace pitch3d {

enum class ErrorCode {
  InvalidParams,
  InvalidRanges,
  NonConvergent,
  BehindCamera,
  EmptyTrajectory,
  EmptyDataset,
  TooFewTrajectories,
  IoError,
  FormatError,
  InvalidConfig,
  ShapeMismatch,
  EmptyBatch,
  Diverged,
};

const char* to_string(ErrorCode code) noexcept;

/// Single exception type for the library; the code identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pitch3d
