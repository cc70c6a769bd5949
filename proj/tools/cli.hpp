#pragma once

#include <string>
#include <vector>

namespace ibi::cli {

/// Exit codes of the `ibi` tool.
enum ExitCode : int { kOk = 0, kUsage = 2, kIo = 3, kInternal = 4 };

/// Run the tool with argv-style arguments (args[0] is the program name).
int run(const std::vector<std::string>& args);

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "IBI_OUTPUT_DIR";

}  // namespace ibi::cli
