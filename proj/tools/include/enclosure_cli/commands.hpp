#pragma once

#include "enclosure_cli/config.hpp"

#include <filesystem>
#include <optional>
#include <ostream>

namespace enclosure::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitRegimeEmpty = 2,
  kExitNumerical = 3,
};

struct CommandOptions {
  std::optional<int> direction;             // restricts check/sweep to one direction index
  std::optional<std::filesystem::path> out; // overrides config.output_dir
};

/// Prints a and b per inclusion with the P, Q weights; writes reduce.json.
int cmd_reduce(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out);

/// Regime table per direction; writes check.json. Returns kExitRegimeEmpty
/// when some direction has no applicable regime.
int cmd_check(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out);

/// Writes indicator.csv, support.csv and hull.csv and prints a summary.
int cmd_sweep(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out);

/// Writes vertices.csv and triangles.csv and prints mesh statistics.
int cmd_mesh_dump(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out);

/// Full command line entry point; maps library errors onto exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace enclosure::cli
