#pragma once

#include <string>

#include <json.hpp>

#include "starkg/netfunc.hpp"
#include "starkg/network.hpp"

namespace starkg {

/// Parsed experiment description: the network plus the raw document, from
/// which each subcommand pulls its own fields.
struct ExperimentConfig {
  StarNetwork net;
  nlohmann::json raw;
};

/// Loads and validates a JSON config.  Any parse, type or network validation
/// problem is reported as ConfigError.
ExperimentConfig load_config(const std::string& path);

/// Builds initial/test data from a JSON array of smooth bumps:
/// [{"branch": 1, "center": 1.2, "width": 0.35, "amplitude": 1.0,
///   "phase": 0.0}, ...].  Each bump is C-infinity with support
/// [center-width, center+width] clipped to the branch.
NetworkFunction function_from_json(const nlohmann::json& spec,
                                   const StarNetwork& net);

}  // namespace starkg
