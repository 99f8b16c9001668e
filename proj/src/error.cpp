#include "pitch3d/error.hpp"

namespace pitch3d {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidRanges: return "InvalidRanges";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::EmptyTrajectory: return "EmptyTrajectory";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::TooFewTrajectories: return "TooFewTrajectories";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::Diverged: return "Diverged";
  }
  return "Unknown";
}

}  // namespace pitch3d
