#pragma once

#include <string>

#include "magbot/scenario.hpp"

namespace magbot {

// JSON scenario/config. Relative file references resolve against base_dir.
// Throws ConfigError on malformed content (with the step index for step errors).
Scenario parse_scenario(const std::string& text, const std::string& base_dir = ".");
// Throws IoError if the file cannot be read.
Scenario load_scenario(const std::string& path);

// The robot, scaling and capacity sections alone (other keys ignored).
Robot parse_robot_section(const std::string& text);
void parse_scaling_section(const std::string& text, ScalePlan& plan, CapacityData& data);

}  // namespace magbot
