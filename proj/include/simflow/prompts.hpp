#pragma once

#include <string>

#include "simflow/types.hpp"

namespace simflow::agent::prompts {

// All prompts are fixed constants for a given engine version; tests pin
// their hashes so accidental edits surface immediately.

const std::string& base_system();
const std::string& role_system(Role role);     // base + role section
const std::string& planner_system();
const std::string& monolithic_system();        // base + every role section

}  // namespace simflow::agent::prompts
