#pragma once

#include <string>
#include <vector>

#include "evsim/sim.hpp"

namespace evsim {

std::string policy_name(Policy policy);
Policy parse_policy(const std::string& name);
std::string state_update_name(StateUpdate mode);
StateUpdate parse_state_update(const std::string& name);

// Loads a scenario config from a JSON file (// and /* */ comments are
// accepted) and applies dotted-path overrides such as
// "arrival_intensity=25" or "weights.tau=0.5" or "stations.1.price=59".
// A file whose root carries a "config" object (an emitted summary) is
// unwrapped, so runs can be reproduced straight from their summaries.
// Raises ConfigError with a line-precise message on parse failure and a
// key-named message on validation failure.
ScenarioConfig load_config_file(const std::string& path,
                                const std::vector<std::string>& overrides);

// Same, from in-memory text; `source_name` labels error messages.
ScenarioConfig config_from_json_text(const std::string& text,
                                     const std::string& source_name,
                                     const std::vector<std::string>& overrides);

// Fully resolved config as pretty-printed JSON; parsing it back yields an
// identical config.
std::string config_to_json_text(const ScenarioConfig& config);

}  // namespace evsim
