#include <algorithm>
#include <filesystem>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <string>

#include "explore/errors.hpp"
#include "explore/protocol.hpp"
#include "json.hpp"

namespace explore {

using nlohmann::json;

std::shared_ptr<const Scenario> resolve_scenario(std::string_view name_or_path) {
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const Scenario>, std::less<>> cache;
    const bool is_builtin = std::find(std::begin(kBuiltinNames), std::end(kBuiltinNames),
                                      name_or_path) != std::end(kBuiltinNames);
    if (is_builtin) {
        std::lock_guard lock(mu);
        if (auto it = cache.find(name_or_path); it != cache.end()) return it->second;
        auto s = std::make_shared<const Scenario>(builtin(name_or_path));
        cache.emplace(std::string(name_or_path), s);
        return s;
    }
    const std::filesystem::path path(name_or_path);
    if (!std::filesystem::exists(path)) {
        throw UnknownName("scenario '" + std::string(name_or_path) +
                          "' is neither a builtin nor an existing file");
    }
    return std::make_shared<const Scenario>(load_scenario(path));
}

namespace {

Pose pose_from(const json& p) {
    if (!p.is_array() || p.size() < 2) throw InvalidConfig("pose must be [x, y] or [x, y, theta]");
    return {p.at(0).get<double>(), p.at(1).get<double>(), p.size() > 2 ? p.at(2).get<double>() : 0.0};
}

json pose_to(const Pose& p) { return json::array({p.x, p.y, p.theta}); }

json map_to(const OccupancyGrid& g) {
    std::string cells(g.size(), '?');
    for (std::size_t i = 0; i < g.size(); ++i) cells[i] = state_char(g[i]);
    return {{"width", g.width()},
            {"height", g.height()},
            {"resolution", g.resolution()},
            {"origin", {g.origin().x, g.origin().y}},
            {"cells", cells}};
}

void apply_params(StrategyParams& p, const json& j) {
    for (const auto& [key, v] : j.items()) {
        if (key == "min_cluster") {
            p.frontier.min_cluster = v.get<int>();
        } else if (key == "gain_range") {
            p.frontier.gain_range = v.get<double>();
        } else if (key == "euclidean_cost") {
            p.euclidean_cost = v.get<bool>();
        } else if (key == "lambda_d") {
            p.lambda_d = v.get<double>();
        } else if (key == "lambda_r") {
            p.lambda_r = v.get<double>();
        } else if (key == "repulsion_weight") {
            if (v.is_null()) {
                p.repulsion_weight.reset();
            } else {
                p.repulsion_weight = v.get<double>();
            }
        } else if (key == "rrt_step") {
            p.rrt_step = v.get<double>();
        } else if (key == "rrt_iterations") {
            p.rrt_iterations = v.get<int>();
        } else if (key == "rrt_revenue_weight") {
            p.rrt_revenue_weight = v.get<double>();
        } else if (key == "rrt_max_nodes") {
            p.rrt_max_nodes = v.get<std::size_t>();
        } else if (key == "goal_hold_decisions") {
            p.goal_hold_decisions = v.get<int>();
        } else {
            throw InvalidConfig("unknown strategy parameter '" + key + "'");
        }
    }
}

}  // namespace

RunConfig config_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidConfig(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw InvalidConfig("config must be a JSON object");
    if (!j.contains("scenario")) throw InvalidConfig("config needs a scenario");
    RunConfig c;
    try {
        c.scenario = resolve_scenario(j.at("scenario").get<std::string>());
        c.n_robots = j.value("robots", std::size_t{1});
        c.strategy = parse_strategy(j.value("strategy", std::string("cost")));
        c.seed = j.value("seed", std::uint64_t{0});
        c.spawn_mode = parse_spawn_mode(j.value("spawn", std::string("far")));
        if (j.contains("spawns")) {
            for (const auto& p : j.at("spawns")) c.spawns.push_back(pose_from(p));
        }
        c.timeout = j.value("timeout", c.timeout);
        c.decision_period = j.value("decision_period", c.decision_period);
        c.v_max = j.value("v_max", c.v_max);
        c.target_ratio = j.value("target_ratio", c.target_ratio);
        c.topo_ratio = j.value("topo_ratio", c.topo_ratio);
        if (j.contains("sensor")) {
            c.sensor.range = j.at("sensor").value("range", c.sensor.range);
            c.sensor.rays = j.at("sensor").value("rays", c.sensor.rays);
        }
        if (j.contains("params")) apply_params(c.strategy_params, j.at("params"));
    } catch (const json::exception& e) {
        throw InvalidConfig(std::string("config field: ") + e.what());
    }
    validate_config(c);
    return c;
}

namespace {

json observation_to(const EnvObservation& obs) {
    json poses = json::array();
    for (const Pose& p : obs.poses) poses.push_back(pose_to(p));
    return {{"time", obs.time}, {"coverage", obs.coverage}, {"poses", poses},
            {"map", map_to(obs.merged_map)}};
}

json error_to(std::string_view what) { return {{"type", "error"}, {"error", std::string(what)}}; }

}  // namespace

std::string observation_json(const EnvObservation& obs) { return observation_to(obs).dump(); }

std::string handle_env_request(Env& env, std::string_view line) {
    json req;
    try {
        req = json::parse(line);
    } catch (const json::exception& e) {
        return error_to(std::string("ParseError: ") + e.what()).dump();
    }
    try {
        const std::string type = req.value("type", std::string());
        json resp;
        if (type == "reset") {
            if (!req.contains("config")) throw InvalidInput("reset needs a config object");
            const EnvObservation obs = env.reset(config_from_json(req.at("config").dump()));
            resp = observation_to(obs);
            resp["done"] = env.engine().done();
        } else if (type == "step") {
            if (!env.ready()) throw NotReset("step before reset");
            std::vector<Pose> goals;
            for (const auto& g : req.value("goals", json::array())) goals.push_back(pose_from(g));
            const EnvStep step = env.step(goals);
            resp = observation_to(step.obs);
            resp["done"] = step.done;
            resp["info"] = {{"clamped", step.info.clamped}, {"no_frontier", step.info.no_frontier}};
        } else {
            throw InvalidInput("unknown message type '" + type + "'");
        }
        if (env.engine().done()) {
            resp["type"] = "done";
            resp["termination"] = std::string(to_string(*env.engine().termination()));
            resp["metrics"] = json::parse(metrics_to_json(env.engine().metrics()));
        } else {
            resp["type"] = "obs";
        }
        return resp.dump();
    } catch (const json::exception& e) {
        return error_to(std::string("InvalidInput: ") + e.what()).dump();
    } catch (const std::exception& e) {
        return error_to(e.what()).dump();
    }
}

int serve_env(std::istream& in, std::ostream& out) {
    Env env;
    int errors = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string resp = handle_env_request(env, line);
        if (resp.find("\"type\":\"error\"") != std::string::npos) ++errors;
        out << resp << '\n' << std::flush;
    }
    return errors;
}

}  // namespace explore
