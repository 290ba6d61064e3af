#include "gcnalign/error.h"

namespace gcnalign {

std::string_view to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kInvalidArgument:
      return "invalid_argument";
    case ErrorCategory::kDataset:
      return "dataset";
    case ErrorCategory::kIo:
      return "io";
    case ErrorCategory::kNumeric:
      return "numeric";
    case ErrorCategory::kConfig:
      return "config";
    case ErrorCategory::kMismatch:
      return "mismatch";
  }
  return "unknown";
}

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kInvalidArgument:
      return 2;
    case ErrorCategory::kConfig:
      return 3;
    case ErrorCategory::kDataset:
      return 4;
    case ErrorCategory::kIo:
      return 5;
    case ErrorCategory::kNumeric:
      return 6;
    case ErrorCategory::kMismatch:
      return 7;
  }
  return 1;
}

}  // namespace gcnalign
