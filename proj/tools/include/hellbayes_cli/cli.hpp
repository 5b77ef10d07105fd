#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hellbayes/experiments.hpp"

namespace hellbayes::cli {

enum ExitCode : int { kOk = 0, kConfigFailure = 1, kNumericFailure = 2 };

/// Runs one subcommand. `args` excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Simulation config from JSON; unknown keys at any level raise ConfigError.
SimulationConfig simulation_config_from_json(const nlohmann::json& j);

}  // namespace hellbayes::cli
