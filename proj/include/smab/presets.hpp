#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smab/config.hpp"

namespace smab {

struct Preset {
    std::string name;
    std::string description;
    RunSpec spec;
};

// Canned scenarios: the full-scale reproduction runs, the tau sweep, the
// deviation audit, the truthful baseline, and the small-slack stress setup.
const std::vector<Preset>& presets();

std::optional<RunSpec> preset_spec(const std::string& name);

}  // namespace smab
