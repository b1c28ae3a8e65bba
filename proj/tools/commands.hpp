#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace becq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitArgument = 1;
inline constexpr int kExitNumerical = 2;

struct RunConfig {
  std::string command;
  std::map<std::string, std::string> params;
};

const std::vector<std::string>& command_names();
// Keys accepted by a command (config-file keys and flag names without "--").
const std::vector<std::string>& command_keys(const std::string& command);

// `key = value` lines, `#` starts a comment. Throws ArgumentError.
std::map<std::string, std::string> read_config_file(const std::string& path);

// Writes the CSV to params["out"] (default "<command>.csv", "-" for stdout)
// and the summary to `summary`. Returns the exit code; library exceptions
// propagate to the caller.
int run_command(const RunConfig& cfg, std::ostream& summary);

}  // namespace becq::cli
