#pragma once

#include <string>

#include "smock/pattern.hpp"

inline smock::PatternSpec load_pattern(const std::string& name) {
    return smock::load_pattern_file(std::string(SMOCKLAB_PATTERNS_DIR) + "/" + name + ".json");
}
