#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

#include "explore/engine.hpp"

namespace explore {

// Builtin name or path to a saved scenario (.json / .yaml / .pgm).
std::shared_ptr<const Scenario> resolve_scenario(std::string_view name_or_path);

// Run configuration from a JSON object:
//   {"scenario": "room", "robots": 2, "strategy": "field", "seed": 3,
//    "spawn": "close", "spawns": [[x, y, theta], ...], "timeout": 3000,
//    "decision_period": 1, "v_max": 1, "target_ratio": 0.99, "topo_ratio": 0.9,
//    "sensor": {"range": 7, "rays": 720},
//    "params": {"lambda_d": 3, "lambda_r": 3, "repulsion_weight": 10, ...}}
// Only "scenario" is required. Throws InvalidConfig / UnknownName.
RunConfig config_from_json(std::string_view text);

std::string observation_json(const EnvObservation& obs);

// Newline-delimited JSON episode protocol. Requests:
//   {"type": "reset", "config": {...}}
//   {"type": "step", "goals": [[x, y], ...]}
// Responses, one line each: {"type": "obs", ...} while running,
// {"type": "done", ..., "metrics": {...}} once the episode has ended, or
// {"type": "error", "error": "..."}.
std::string handle_env_request(Env& env, std::string_view line);

// Serves requests until EOF. Returns the number of error responses.
int serve_env(std::istream& in, std::ostream& out);

}  // namespace explore
