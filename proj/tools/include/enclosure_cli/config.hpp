#pragma once

#include <enclosure/geometry.hpp>
#include <enclosure/materials.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace enclosure::cli {

struct SweepConfig {
  int n_directions = 16;
  double tau_min = 4.0;
  double tau_max = 16.0;
  int n_tau = 13;
  double delta = 0.0;  // <= 0: default slab depth

  std::vector<double> taus() const;
};

struct ScenarioConfig {
  Domain domain = UnitDisk{};
  MaterialScene scene;
  SweepConfig sweep;
  double target_h = 0.02;
  std::filesystem::path output_dir = "enclosure-out";
};

/// Parses and validates a scenario. `source` names the input in messages.
/// Throws Error(Config) on malformed JSON (with line and column), unknown or
/// missing keys, wrong types and full 2x2 matrices; the material and
/// geometry checks of the core library are applied on top and their errors
/// are rethrown as Config with the offending key path.
ScenarioConfig parse_config(std::string_view text, std::string_view source = "<config>");

/// Reads and parses a file. Throws Error(Io) when it cannot be read.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Canonical JSON with every field written out; parse_config accepts it.
std::string serialize(const ScenarioConfig& config);

}  // namespace enclosure::cli
