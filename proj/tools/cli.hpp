#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace selfsim::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kSuccess = 0, kVerificationFailure = 1, kUsageError = 2 };

// Parses and dispatches one invocation; args excludes the program name.
int run(const std::vector<std::string>& args);

// Line-based key=value pairs; '#' starts a comment. Throws std::runtime_error on
// unreadable files or lines without '='.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

// Removes `--config <path>` from args and appends `--key value` for every file entry whose
// flag is not already present, so command-line flags win.
std::vector<std::string> merge_config(const std::vector<std::string>& args);

}  // namespace selfsim::cli
