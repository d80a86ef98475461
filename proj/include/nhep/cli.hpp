#pragma once

// Command layer shared by the nhep executable and the tests. A run resolves
// its configuration in four layers (command defaults, named preset, JSON
// config file, command-line flags; later layers win), validates it, executes
// the command and writes artifacts into the output directory.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace nhep {

struct CliRequest {
  std::string command;
  std::optional<std::string> preset;
  std::optional<std::filesystem::path> config_path;
  std::filesystem::path out_dir = ".";
  std::optional<int> threads;
  std::optional<std::pair<int, int>> grid;
  std::optional<double> tolerance;
};

std::vector<std::string> command_names();

/// Presets accepted by a command; the first entry is its default.
std::vector<std::string> command_presets(const std::string& command);

/// Parses "<n1>x<n2>".
std::pair<int, int> parse_grid(const std::string& text);

/// Fully resolved configuration for the request. Throws Error(config_error).
nlohmann::json resolve_config(const CliRequest& request);

/// Runs an already resolved configuration, writes the artifacts and returns
/// the report that was written as the command's JSON file.
nlohmann::json execute(const std::string& command, const nlohmann::json& config,
                       const std::filesystem::path& out_dir);

/// Resolve, execute and print the report to `out`. On failure prints
/// {"error": {"code", "message"}} to `err` and returns nonzero
/// (2 for configuration and parse errors, 1 otherwise).
int run(const CliRequest& request, std::ostream& out, std::ostream& err);

}  // namespace nhep
