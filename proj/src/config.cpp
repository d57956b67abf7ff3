#include "evsim/config.hpp"

#include <algorithm>
#include <string>

#include "evsim/errors.hpp"
#include "evsim/io.hpp"
#include "json.hpp"

namespace evsim {

namespace {

using nlohmann::json;

int line_of_byte(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') ++line;
  }
  return line;
}

[[noreturn]] void fail(const std::string& source, const std::string& message) {
  throw ConfigError(source + ": " + message);
}

double require_number(const json& node, const std::string& source,
                      const std::string& key) {
  if (!node.is_number()) fail(source, "key '" + key + "' must be a number");
  return node.get<double>();
}

int require_int(const json& node, const std::string& source,
                const std::string& key) {
  if (!node.is_number_integer()) {
    fail(source, "key '" + key + "' must be an integer");
  }
  return node.get<int>();
}

std::array<double, 2> require_range(const json& node, const std::string& source,
                                    const std::string& key) {
  if (!node.is_array() || node.size() != 2) {
    fail(source, "key '" + key + "' must be a [lo, hi] pair");
  }
  std::array<double, 2> range{require_number(node[0], source, key),
                              require_number(node[1], source, key)};
  if (range[0] > range[1]) fail(source, "key '" + key + "' has lo > hi");
  return range;
}

// Walks a dotted path, creating objects as needed; array elements are
// addressed by zero-based index.
json* descend(json* node, const std::string& path, const std::string& source) {
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string part = path.substr(
        start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) fail(source, "override path has an empty segment");
    if (node->is_array()) {
      std::size_t index = 0;
      try {
        index = std::stoul(part);
      } catch (...) {
        fail(source, "override index '" + part + "' is not a number");
      }
      if (index >= node->size()) {
        fail(source, "override index '" + part + "' out of range");
      }
      node = &(*node)[index];
    } else {
      node = &(*node)[part];
    }
    if (dot == std::string::npos) return node;
    start = dot + 1;
  }
}

void apply_override(json* root, const std::string& spec,
                    const std::string& source) {
  const std::size_t eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    fail(source, "override '" + spec + "' is not of the form key=value");
  }
  const std::string path = spec.substr(0, eq);
  const std::string value = spec.substr(eq + 1);
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (...) {
    parsed = value;  // bare words become strings
  }
  *descend(root, path, source) = parsed;
}

ScenarioConfig config_from_json(const json& root, const std::string& source) {
  ScenarioConfig config = default_config();

  for (const auto& [key, value] : root.items()) {
    if (key == "stations") {
      if (!value.is_array() || value.empty()) {
        fail(source, "key 'stations' must be a nonempty array");
      }
      config.stations.clear();
      int index = 1;
      for (const auto& node : value) {
        Station station;
        station.index = index++;
        station.chargers = require_int(node.at("chargers"), source,
                                       "stations.chargers");
        station.service_rate = require_number(node.at("service_rate"), source,
                                              "stations.service_rate");
        station.price = require_number(node.at("price"), source,
                                       "stations.price");
        station.location = require_number(node.at("location"), source,
                                          "stations.location");
        if (station.chargers < 1) {
          fail(source, "stations.chargers must be >= 1");
        }
        if (!(station.service_rate > 0.0)) {
          fail(source, "stations.service_rate must be > 0");
        }
        if (station.price < 0.0) fail(source, "stations.price must be >= 0");
        config.stations.push_back(station);
      }
    } else if (key == "arrival_intensity") {
      config.arrival_intensity = require_number(value, source, key);
      if (!(config.arrival_intensity > 0.0)) {
        fail(source, "key 'arrival_intensity' must be > 0");
      }
    } else if (key == "epochs") {
      config.epochs = require_int(value, source, key);
      if (config.epochs < 1) fail(source, "key 'epochs' must be >= 1");
    } else if (key == "window") {
      config.window = require_int(value, source, key);
      if (config.window < 1) fail(source, "key 'window' must be >= 1");
    } else if (key == "weights") {
      if (value.contains("tau")) {
        config.weights.tau = require_number(value["tau"], source, "weights.tau");
      }
      if (value.contains("eta")) {
        config.weights.eta = require_number(value["eta"], source, "weights.eta");
      }
      if (value.contains("kappa")) {
        config.weights.kappa =
            require_number(value["kappa"], source, "weights.kappa");
      }
      if (config.weights.tau < 0.0 || config.weights.eta < 0.0 ||
          !(config.weights.kappa > 0.0)) {
        fail(source, "weights must satisfy tau, eta >= 0 and kappa > 0");
      }
    } else if (key == "safety") {
      config.safety = require_number(value, source, key);
      if (config.safety < 0.0 || config.safety >= 1.0) {
        fail(source, "key 'safety' must lie in [0, 1)");
      }
    } else if (key == "rate_floor") {
      config.rate_floor = require_number(value, source, key);
      if (!(config.rate_floor > 0.0)) {
        fail(source, "key 'rate_floor' must be > 0");
      }
    } else if (key == "solver_tol") {
      config.solver_tol = require_number(value, source, key);
      if (!(config.solver_tol > 0.0)) {
        fail(source, "key 'solver_tol' must be > 0");
      }
    } else if (key == "seed") {
      if (!value.is_number_unsigned() && !value.is_number_integer()) {
        fail(source, "key 'seed' must be an integer");
      }
      config.seed = value.get<std::uint64_t>();
    } else if (key == "ev") {
      if (value.contains("wtp_cap")) {
        config.ev.wtp_cap = require_range(value["wtp_cap"], source, "ev.wtp_cap");
      }
      if (value.contains("position")) {
        config.ev.position =
            require_range(value["position"], source, "ev.position");
      }
      if (value.contains("soc")) {
        config.ev.soc = require_range(value["soc"], source, "ev.soc");
        if (config.ev.soc[0] < 0.0 || config.ev.soc[1] > 1.0) {
          fail(source, "key 'ev.soc' must stay within [0, 1]");
        }
      }
      if (value.contains("curvature")) {
        config.ev.curvature =
            require_range(value["curvature"], source, "ev.curvature");
        if (!(config.ev.curvature[0] > 0.0)) {
          fail(source, "key 'ev.curvature' must be positive");
        }
      }
      if (value.contains("anxiety_values")) {
        const auto& list = value["anxiety_values"];
        if (!list.is_array() || list.empty()) {
          fail(source, "key 'ev.anxiety_values' must be a nonempty array");
        }
        config.ev.anxiety_values.clear();
        for (const auto& node : list) {
          const double a = require_number(node, source, "ev.anxiety_values");
          if (a < 0.0) fail(source, "anxiety values must be >= 0");
          config.ev.anxiety_values.push_back(a);
        }
      }
    } else if (key == "state_update") {
      if (!value.is_string()) fail(source, "key 'state_update' must be a string");
      try {
        config.state_update = parse_state_update(value.get<std::string>());
      } catch (const std::exception& e) {
        fail(source, e.what());
      }
    } else if (key == "policy") {
      if (!value.is_string()) fail(source, "key 'policy' must be a string");
      try {
        config.policy = parse_policy(value.get<std::string>());
      } catch (const std::exception& e) {
        fail(source, e.what());
      }
    } else {
      fail(source, "unknown key '" + key + "'");
    }
  }
  return config;
}

}  // namespace

std::string policy_name(Policy policy) {
  switch (policy) {
    case Policy::kTwoStage: return "two_stage";
    case Policy::kNearest: return "nearest";
    case Policy::kMatching: return "matching";
  }
  return "two_stage";
}

Policy parse_policy(const std::string& name) {
  if (name == "two_stage") return Policy::kTwoStage;
  if (name == "nearest") return Policy::kNearest;
  if (name == "matching") return Policy::kMatching;
  throw std::invalid_argument("unknown policy '" + name +
                              "' (expected two_stage, nearest, or matching)");
}

std::string state_update_name(StateUpdate mode) {
  return mode == StateUpdate::kQuota ? "quota" : "assigned";
}

StateUpdate parse_state_update(const std::string& name) {
  if (name == "quota") return StateUpdate::kQuota;
  if (name == "assigned") return StateUpdate::kAssigned;
  throw std::invalid_argument("unknown state_update '" + name +
                              "' (expected quota or assigned)");
}

ScenarioConfig load_config_file(const std::string& path,
                                const std::vector<std::string>& overrides) {
  const std::string text = read_text_file(path);
  return config_from_json_text(text, path, overrides);
}

namespace {

void deep_merge(json* base, const json& overlay) {
  for (const auto& [key, value] : overlay.items()) {
    if (value.is_object() && base->contains(key) && (*base)[key].is_object()) {
      deep_merge(&(*base)[key], value);
    } else {
      (*base)[key] = value;
    }
  }
}

}  // namespace

ScenarioConfig config_from_json_text(const std::string& text,
                                     const std::string& source_name,
                                     const std::vector<std::string>& overrides) {
  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    fail(source_name, "line " + std::to_string(line_of_byte(text, e.byte)) +
                          ": " + e.what());
  }
  if (!root.is_object()) fail(source_name, "config root must be an object");
  // An emitted summary.json embeds the run's resolved config; accept it
  // directly so summaries are replayable.
  if (root.contains("config") && root.contains("artifact_version")) {
    root = root["config"];
  }
  // Dotted-path overrides address the fully resolved document, so the
  // user file is laid over the defaults before they apply.
  json resolved = json::parse(config_to_json_text(default_config()));
  deep_merge(&resolved, root);
  for (const auto& spec : overrides) {
    apply_override(&resolved, spec, source_name);
  }
  try {
    return config_from_json(resolved, source_name);
  } catch (const json::exception& e) {
    fail(source_name, e.what());
  }
}

std::string config_to_json_text(const ScenarioConfig& config) {
  json root;
  root["arrival_intensity"] = config.arrival_intensity;
  root["epochs"] = config.epochs;
  root["window"] = config.window;
  root["safety"] = config.safety;
  root["rate_floor"] = config.rate_floor;
  root["solver_tol"] = config.solver_tol;
  root["seed"] = config.seed;
  root["policy"] = policy_name(config.policy);
  root["state_update"] = state_update_name(config.state_update);
  root["weights"] = {{"tau", config.weights.tau},
                     {"eta", config.weights.eta},
                     {"kappa", config.weights.kappa}};
  root["ev"] = {{"wtp_cap", config.ev.wtp_cap},
                {"position", config.ev.position},
                {"soc", config.ev.soc},
                {"curvature", config.ev.curvature},
                {"anxiety_values", config.ev.anxiety_values}};
  json stations = json::array();
  for (const auto& station : config.stations) {
    stations.push_back({{"chargers", station.chargers},
                        {"service_rate", station.service_rate},
                        {"price", station.price},
                        {"location", station.location}});
  }
  root["stations"] = stations;
  return root.dump(2) + "\n";
}

}  // namespace evsim
