#pragma once

#include <string>
#include <vector>

#include "CLI11.hpp"

namespace fvps::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kValidation = 2;
inline constexpr int kCheckFailed = 3;

struct Globals {
  unsigned jobs = 1;
  std::string config;
};

/// Registers every subcommand on app. The returned callbacks run the selected
/// one and report its exit code.
void register_commands(CLI::App& app, const Globals& globals, int& exit_code);

/// Reads a flat key=value file into "--key=value" arguments. Blank lines and
/// lines starting with '#' are ignored. Throws CLI::ValidationError on malformed lines.
std::vector<std::string> config_arguments(const std::string& path);

}  // namespace fvps::cli
