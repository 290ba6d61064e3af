#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gcnalign {

// Coarse classification used by the CLI to pick an exit code.
enum class ErrorCategory {
  kInvalidArgument,
  kDataset,
  kIo,
  kNumeric,
  kConfig,
  kMismatch,
};

std::string_view to_string(ErrorCategory category);

// Exit code reported by the CLI for an error of this category (always > 0).
int exit_code(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory category, const std::string& message) {
  throw Error(category, message);
}

}  // namespace gcnalign
