#pragma once

#include <string>
#include <vector>

namespace lob::cli {

enum ExitCode : int {
  kSuccess = 0,
  kIoFailure = 1,
  kInvalidConfig = 2,
  kNumericalFailure = 3,
};

/// Entry point shared by the `lobfluid` executable and the tests.
/// `args` excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace lob::cli
