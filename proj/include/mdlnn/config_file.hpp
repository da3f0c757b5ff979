#pragma once

#include <string>

#include "mdlnn/islands.hpp"

namespace mdlnn {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key = value text file for search runs. Required keys: islands,
// population, generations, tournament, migration_size, migration_generations,
// seed. Optional keys have spec defaults; unknown keys are errors.
IslandConfig load_island_config(const std::string& path);

std::string island_config_to_text(const IslandConfig& cfg);

}  // namespace mdlnn
