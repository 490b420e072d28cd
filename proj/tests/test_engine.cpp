#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "doctest.h"
#include "explore/connectivity.hpp"
#include "explore/engine.hpp"
#include "explore/errors.hpp"
#include "explore/protocol.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace explore;

namespace {

std::shared_ptr<const Scenario> make_scenario(const OccupancyGrid& g, std::vector<Cell> spawns,
                                              std::string name) {
    Scenario s;
    s.ground_truth = g;
    for (const Cell c : spawns) s.spawns.push_back(cell_to_world(c, g));
    s.name = std::move(name);
    return std::make_shared<const Scenario>(std::move(s));
}

// 3-cell wide corridor, 15 m long: one scan cannot see it all.
std::shared_ptr<const Scenario> long_corridor() {
    OccupancyGrid g(152, 5, 0.1, CellState::Occupied);
    g.fill_rect(1, 1, 3, 150, CellState::Free);
    return make_scenario(g, {{2, 2}, {2, 4}}, "long");
}

RunConfig config_for(std::shared_ptr<const Scenario> s, StrategyKind k, std::size_t n,
                     SpawnMode mode = SpawnMode::Explicit) {
    RunConfig c;
    c.scenario = std::move(s);
    c.strategy = k;
    c.n_robots = n;
    c.spawn_mode = mode;
    return c;
}

void check_run_invariants(const RunConfig& config, const RunOutput& out) {
    const OccupancyGrid& truth = config.scenario->ground_truth;
    const double tick = truth.resolution() / config.v_max;

    // Moves: one 4-neighbour step per tick, charged res / v.
    std::vector<Cell> at;
    for (const Pose& p : resolve_spawns(config)) at.push_back(world_to_cell(p, truth));
    double last_t = 0.0;
    for (const Event& e : out.log.events) {
        REQUIRE(e.t >= last_t);
        last_t = e.t;
        if (e.kind != EventKind::Move) continue;
        CHECK(e.elapsed == doctest::Approx(tick).epsilon(1e-12));
        const Cell to = truth.cell_of(e.cell);
        const Cell from = at[e.robot];
        CHECK(std::abs(to.row - from.row) + std::abs(to.col - from.col) == 1);
        CHECK(truth.at(to) == CellState::Free);
        at[e.robot] = to;
        for (std::size_t j = 0; j < at.size(); ++j) {
            if (j != e.robot) CHECK_FALSE(at[j] == to);
        }
    }

    // Coverage curve: time strictly increasing, ratio non-decreasing.
    const auto& s = out.coverage.samples;
    REQUIRE_FALSE(s.empty());
    CHECK(s.front().time == 0.0);
    for (std::size_t i = 1; i < s.size(); ++i) {
        CHECK(s[i].time > s[i - 1].time);
        CHECK(s[i].ratio >= s[i - 1].ratio);
    }
    CHECK(s.back().ratio == doctest::Approx(out.metrics.final_ratio));

    // Replaying the observation events rebuilds the final merged map.
    OccupancyGrid replay(truth.width(), truth.height(), truth.resolution(), CellState::Unknown,
                         truth.origin());
    for (const Event& e : out.log.events) {
        if (e.kind == EventKind::Observation) replay[e.cell] = e.state;
    }
    CHECK(replay == out.final_map);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (out.final_map[i] != CellState::Unknown) REQUIRE(out.final_map[i] == truth[i]);
    }

    // Metrics agree with the log.
    const auto mask = observable_mask(truth);
    const Attribution attr = attribute_coverage(out.log, config.n_robots, mask);
    CHECK(attr.areas == out.metrics.areas);
    if (config.n_robots >= 2) {
        REQUIRE(out.metrics.overlap.has_value());
        const auto observable = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
        CHECK(*out.metrics.overlap == doctest::Approx(overlap_ratio(attr.known, observable)));
    } else {
        CHECK_FALSE(out.metrics.overlap.has_value());
    }
    if (out.metrics.t_topo && out.metrics.t_total) CHECK(*out.metrics.t_topo <= *out.metrics.t_total);
    REQUIRE_FALSE(out.log.events.empty());
    CHECK(out.log.events.back().kind == EventKind::Termination);
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("a room inside sensor range is complete after the first scan") {
    OccupancyGrid g(12, 12, 0.1, CellState::Occupied);
    g.fill_rect(1, 1, 10, 10, CellState::Free);
    const RunOutput out = run(config_for(make_scenario(g, {{5, 5}}, "tiny"), StrategyKind::Cost, 1));
    CHECK(out.metrics.termination == Termination::Complete);
    CHECK(out.metrics.t_total == 0.0);
    CHECK(out.metrics.final_ratio == 1.0);
}

TEST_CASE("a corridor longer than the sensor range needs driving") {
    const RunConfig c = config_for(long_corridor(), StrategyKind::Cost, 1);
    const RunOutput out = run(c);
    CHECK(out.metrics.termination == Termination::Complete);
    REQUIRE(out.metrics.t_total.has_value());
    // At least ~15 m - 7 m - slack must be driven at 1 m/s.
    CHECK(*out.metrics.t_total > 6.0);
    check_run_invariants(c, out);

    Engine e(c);
    int decisions = 0;
    while (!e.done()) {
        const auto goals = e.decide();
        e.advance(goals);
        ++decisions;
    }
    CHECK(decisions <= 12);
}

TEST_CASE("runs are deterministic and keep the run invariants") {
    for (const char* name : {"room", "corridor"}) {
        for (const StrategyKind k : {StrategyKind::Cost, StrategyKind::Field, StrategyKind::Sample,
                                     StrategyKind::Goal}) {
            for (const std::size_t n : {std::size_t{1}, std::size_t{2}}) {
                CAPTURE(name);
                CAPTURE(to_string(k));
                CAPTURE(n);
                RunConfig c = config_for(resolve_scenario(name), k, n, SpawnMode::Far);
                c.seed = 3;
                c.timeout = 300.0;
                const RunOutput a = run(c);
                const RunOutput b = run(c);
                CHECK(serialize_events(a.log) == serialize_events(b.log));
                CHECK(a.metrics == b.metrics);
                check_run_invariants(c, a);
            }
        }
    }
}

TEST_CASE("timeout is reported, not thrown") {
    RunConfig c = config_for(resolve_scenario("room"), StrategyKind::Cost, 1, SpawnMode::Far);
    c.timeout = 5.0;
    const RunOutput out = run(c);
    CHECK(out.metrics.termination == Termination::Timeout);
    CHECK(out.metrics.sim_time == doctest::Approx(5.0));
    CHECK_FALSE(out.metrics.t_total.has_value());
}

TEST_CASE("sealed-in robot ends with NoFrontier") {
    // Free pocket the robot sees entirely, next to observable space it cannot reach.
    const auto g = testing::ascii({"##########", "#..#.....#", "#..#.....#", "##########"});
    const RunOutput out = run(config_for(make_scenario(g, {{1, 1}}, "pocket"), StrategyKind::Cost, 1));
    CHECK(out.metrics.termination == Termination::NoFrontier);
    CHECK(out.metrics.final_ratio < 0.99);
}

TEST_CASE("validate_config") {
    const auto s = resolve_scenario("room");
    RunConfig c = config_for(s, StrategyKind::Cost, 1, SpawnMode::Far);
    CHECK_NOTHROW(validate_config(c));
    RunConfig bad = c;
    bad.n_robots = 0;
    CHECK_THROWS_AS(validate_config(bad), InvalidConfig);
    bad = c;
    bad.v_max = 0.0;
    CHECK_THROWS_AS(validate_config(bad), InvalidConfig);
    bad = c;
    bad.decision_period = 0.01;
    CHECK_THROWS_AS(validate_config(bad), InvalidConfig);
    bad = c;
    bad.topo_ratio = 0.995;
    CHECK_THROWS_AS(validate_config(bad), InvalidConfig);
    bad = c;
    bad.scenario.reset();
    CHECK_THROWS_AS(validate_config(bad), InvalidConfig);
    bad = c;
    bad.spawn_mode = SpawnMode::Explicit;
    bad.n_robots = 5;
    CHECK_THROWS_AS(validate_config(bad), InvalidConfig);
    bad = c;
    bad.spawn_mode = SpawnMode::Explicit;
    bad.spawns = {{0.05, 0.05, 0.0}};
    CHECK_THROWS_AS(Engine{bad}, InvalidConfig);

    RunConfig other = c;
    other.seed = 1;
    CHECK(config_hash(c) == config_hash(c));
    CHECK(config_hash(c) != config_hash(other));
}

TEST_CASE("Env: reset, step, clamping") {
    Env env;
    const std::vector<Pose> none{{0.0, 0.0, 0.0}};
    CHECK_THROWS_AS(env.step(none), NotReset);
    CHECK_THROWS_AS(env.engine(), NotReset);

    const RunConfig c = config_for(long_corridor(), StrategyKind::Cost, 2);
    const EnvObservation first = env.reset(c);
    const Engine fresh(c);
    CHECK(first.coverage == fresh.coverage());
    CHECK(first.merged_map == fresh.merged_map());
    CHECK(first.time == 0.0);
    CHECK_THROWS_AS(env.step(none), InvalidInput);

    const std::vector<Pose> outside{{-50.0, 0.25, 0.0}, {100.0, 0.25, 0.0}};
    const EnvStep s1 = env.step(outside);
    CHECK(s1.info.clamped == std::vector<bool>{true, true});
    CHECK(s1.obs.time == doctest::Approx(1.0));

    double coverage = s1.obs.coverage;
    double time = s1.obs.time;
    int steps = 0;
    EnvStep last = s1;
    while (!last.done && steps < 200) {
        last = env.step(last.obs.poses);
        CHECK(last.obs.coverage >= coverage);
        CHECK(last.obs.time >= time);
        CHECK(last.info.clamped == std::vector<bool>{false, false});
        coverage = last.obs.coverage;
        time = last.obs.time;
        ++steps;
    }
    CHECK(last.done);
    CHECK(last.info.termination == Termination::Complete);
}

TEST_CASE("Env driven with cost goals reproduces the cost run") {
    for (const char* name : {"corridor", "room"}) {
        CAPTURE(name);
        RunConfig c = config_for(resolve_scenario(name), StrategyKind::Cost, 2, SpawnMode::Far);
        c.seed = 1;
        Engine ref(c);
        Env env;
        env.reset(c);
        while (!ref.done()) {
            const auto goals = ref.decide();
            std::vector<Pose> ext;
            for (std::size_t i = 0; i < goals.size(); ++i) ext.push_back(goals[i].value_or(ref.poses()[i]));
            ref.advance(goals);
            const EnvStep s = env.step(ext);
            REQUIRE(std::equal(ref.poses().begin(), ref.poses().end(), s.obs.poses.begin()));
            REQUIRE(s.obs.coverage == ref.coverage());
            REQUIRE(s.done == ref.done());
        }
        CHECK(env.engine().metrics() == ref.metrics());
        CHECK(serialize_events(env.engine().log()) == serialize_events(ref.log()));
    }
}

TEST_CASE("run_batch: worker count does not change results") {
    std::vector<RunConfig> configs;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        RunConfig c = config_for(resolve_scenario(seed % 2 ? "room" : "comb2"), StrategyKind::Sample, 2,
                                 SpawnMode::Far);
        c.seed = seed;
        c.timeout = 200.0;
        configs.push_back(c);
    }
    RunConfig broken = configs.front();
    broken.v_max = -1.0;
    configs.insert(configs.begin() + 2, broken);

    const auto one = run_batch(configs, 1);
    const auto eight = run_batch(configs, 8);
    REQUIRE(one.size() == configs.size());
    REQUIRE(eight.size() == configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) {
        CHECK(one[i].error == eight[i].error);
        CHECK(one[i].metrics == eight[i].metrics);
        CHECK(one[i].log_digest == eight[i].log_digest);
    }
    CHECK_FALSE(one[2].error.empty());
    CHECK_FALSE(one[2].metrics.has_value());
    CHECK(one[3].metrics.has_value());
    CHECK(run_batch(std::span<const RunConfig>{}, 4).empty());
    CHECK_THROWS_AS(run_batch(configs, 0), ValueError);
}

TEST_CASE("generated scenarios run to a clean termination") {
    Rng rng = make_rng(70);
    for (int trial = 0; trial < 24; ++trial) {
        GenSpec spec;
        spec.kind = static_cast<ScenarioKind>(trial % 4);
        spec.seed = static_cast<std::uint64_t>(trial);
        spec.extent_x = uniform(rng, 12.0, 20.0);
        spec.extent_y = uniform(rng, 12.0, 20.0);
        auto s = std::make_shared<const Scenario>(generate(spec));
        RunConfig c = config_for(s, static_cast<StrategyKind>(trial % 4), 1 + trial % 2, SpawnMode::Far);
        c.seed = static_cast<std::uint64_t>(trial);
        c.timeout = 600.0;
        CAPTURE(trial);
        const RunOutput out = run(c);
        check_run_invariants(c, out);
        CHECK(out.metrics.sim_time <= 600.0 + 1e-9);
    }
}

TEST_CASE("NDJSON episode protocol") {
    using nlohmann::json;
    Env env;
    const json before = json::parse(handle_env_request(env, R"({"type":"step","goals":[[1,1]]})"));
    CHECK(before["type"] == "error");
    CHECK(json::parse(handle_env_request(env, "not json"))["type"] == "error");
    CHECK(json::parse(handle_env_request(env, R"({"type":"dance"})"))["type"] == "error");
    CHECK(json::parse(handle_env_request(env, R"({"type":"reset","config":{"scenario":"cave"}})"))["type"] ==
          "error");

    const json obs = json::parse(handle_env_request(
        env, R"({"type":"reset","config":{"scenario":"room","robots":2,"seed":4,"spawn":"close"}})"));
    REQUIRE(obs["type"] == "obs");
    CHECK(obs["poses"].size() == 2);
    const auto& room = resolve_scenario("room")->ground_truth;
    CHECK(obs["map"]["width"] == room.width());
    CHECK(obs["map"]["cells"].get<std::string>().size() == room.size());
    CHECK(json::parse(handle_env_request(env, R"({"type":"step","goals":[[1,1]]})"))["type"] == "error");

    json last;
    for (int i = 0; i < 5000; ++i) {
        json req = {{"type", "step"}, {"goals", json::array({json::array({18.0, 18.0}), json::array({2.0, 2.0})})}};
        last = json::parse(handle_env_request(env, req.dump()));
        REQUIRE(last["type"] != "error");
        if (last["type"] == "done") break;
    }
    CHECK(last["type"] == "done");
    CHECK(last["metrics"]["n_robots"] == 2);
}

}  // TEST_SUITE
