// Acceptance checks. Usage: acceptance [criterion...]; no arguments runs all.
// One PASS/FAIL line per criterion; exit status 1 if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "explore/connectivity.hpp"
#include "explore/engine.hpp"
#include "explore/errors.hpp"
#include "explore/frontier.hpp"
#include "explore/metrics.hpp"
#include "explore/motion.hpp"
#include "explore/protocol.hpp"
#include "explore/sensing.hpp"
#include "support.hpp"

using namespace explore;

namespace {

// Pinned tolerances and budgets.
constexpr double kMetricRelTol = 1e-12;
constexpr double kRaycastDisagreement = 0.02;
constexpr double kSpeedLowerBoundSlack = 1.25;  // sim_time <= slack * lower bound
constexpr double kMinSimSeconds = 10.0;
constexpr double kMinSpeedup = 5.0;
constexpr double kMaxBatchRatio = 2.0;
constexpr double kCompletionRatio = 0.99;
constexpr double kCompletionTimeout = 3000.0;

constexpr double kBudget1 = 1.0;
constexpr double kBudget2 = 5.0;
constexpr double kBudget3 = 5.0;
constexpr double kBudget4 = 10.0;
constexpr double kBudget5 = 120.0;
constexpr double kBudget7 = 300.0;
constexpr double kBudget8 = 600.0;

const char* const kBuiltins[] = {"loop", "corridor", "corner", "room", "comb1", "comb2"};
constexpr StrategyKind kStrategies[] = {StrategyKind::Cost, StrategyKind::Sample, StrategyKind::Field,
                                        StrategyKind::Goal};

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

bool rel_close(double a, double b, double tol) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) <= tol * scale || std::abs(a - b) == 0.0;
}

std::size_t hardware_workers() { return worker_cap(std::max(1u, std::thread::hardware_concurrency())); }

Outcome criterion1() {
    Rng rng = make_rng(1001);
    int bad_sigma = 0;
    int bad_overlap = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> a(static_cast<std::size_t>(uniform_int(rng, 1, 16)));
        for (double& x : a) x = uniform(rng, 0.0, 400.0);
        if (!rel_close(sigma(a), testing::sigma_oracle(a), kMetricRelTol)) ++bad_sigma;

        const std::size_t universe = static_cast<std::size_t>(uniform_int(rng, 1, 400));
        std::vector<std::vector<std::size_t>> sets(static_cast<std::size_t>(uniform_int(rng, 2, 6)));
        for (auto& s : sets) {
            const double p = uniform01(rng);
            for (std::size_t i = 0; i < universe; ++i) {
                if (uniform01(rng) < p) s.push_back(i);
            }
        }
        if (!rel_close(overlap_ratio(sets, universe), testing::overlap_oracle(sets, universe), kMetricRelTol)) {
            ++bad_overlap;
        }
    }
    const double s24 = sigma(std::vector{2.0, 4.0});
    std::vector<std::size_t> all(500);
    std::iota(all.begin(), all.end(), 0);
    const double full = overlap_ratio(std::vector{all, all}, all.size());
    Outcome o;
    o.pass = bad_sigma == 0 && bad_overlap == 0 && s24 == 1.0 && full == 1.0;
    o.detail = fmt("sigma mismatches %d/1000, r_o mismatches %d/1000, sigma([2,4])=%.17g, r_o(double)=%.17g",
                   bad_sigma, bad_overlap, s24, full);
    return o;
}

Outcome criterion2() {
    Rng rng = make_rng(1002);
    int bad = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const OccupancyGrid m = testing::random_partial(rng, 32, 32);
        const auto cells = frontier_cells(m);
        const std::set<Cell> got(cells.begin(), cells.end());
        std::set<Cell> clustered;
        for (const Frontier& f : detect_frontiers(m, FrontierParams{1, 7.0})) {
            clustered.insert(f.cells.begin(), f.cells.end());
        }
        const auto oracle = testing::frontier_oracle(m);
        if (got != oracle || clustered != oracle) ++bad;
    }
    return {bad == 0, fmt("%d/200 maps differ from the definition scan", bad)};
}

Outcome criterion3() {
    Rng rng = make_rng(1003);
    int solvable = 0;
    int unsolvable = 0;
    int bad = 0;
    while (solvable < 200) {
        const auto g = testing::random_truth(rng, 32, 32, uniform(rng, 0.2, 0.45), false);
        const auto frees = testing::free_cells(g);
        if (frees.size() < 2) continue;
        const Cell s = testing::pick(rng, frees);
        const Cell t = testing::pick(rng, frees);
        const int d = testing::bfs_oracle(g, s)[g.index(t)];
        if (d < 0) {
            ++unsolvable;
            try {
                plan(s, t, g);
                ++bad;
            } catch (const NoPath&) {
            }
            continue;
        }
        ++solvable;
        try {
            const PlannedPath p = plan(s, t, g);
            if (p.cells.size() != static_cast<std::size_t>(d) + 1 ||
                std::abs(p.length - d * g.resolution()) > 1e-9) {
                ++bad;
            }
        } catch (const std::exception&) {
            ++bad;
        }
    }
    return {bad == 0, fmt("%d solvable, %d unsolvable, %d disagreements with BFS", solvable, unsolvable, bad)};
}

Outcome criterion4() {
    Rng rng = make_rng(1004);
    int los_failures = 0;
    int maps_over = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto truth = trial % 2 ? testing::random_blocks(rng, 64, 64, 12)
                                     : testing::random_truth(rng, 64, 64, 0.06);
        const Cell o = testing::pick(rng, testing::free_cells(truth));
        Raycaster caster(SensorSpec{}, truth.resolution());
        const ScanResult scan = caster.scan(o, truth);
        std::set<std::size_t> seen(scan.observed_free.begin(), scan.observed_free.end());
        seen.insert(scan.observed_occupied.begin(), scan.observed_occupied.end());

        // Line of sight: each observed cell ends a ray prefix whose earlier cells are all Free.
        std::set<std::size_t> visible{truth.index(o)};
        for (std::size_t k = 0; k < caster.ray_count(); ++k) {
            for (const Cell off : caster.ray(k)) {
                const Cell c{o.row + off.row, o.col + off.col};
                if (!truth.in_bounds(c)) break;
                visible.insert(truth.index(c));
                if (truth.at(c) != CellState::Free) break;
            }
        }
        for (const std::size_t idx : seen) los_failures += !visible.count(idx);

        const auto oracle = testing::dense_bresenham(truth, o, caster.range_cells(), 3600);
        const std::size_t off_edge = testing::off_edge_disagreement(truth, seen, oracle);
        const double frac = static_cast<double>(off_edge) / static_cast<double>(oracle.size());
        worst = std::max(worst, frac);
        maps_over += frac > kRaycastDisagreement;
    }
    return {los_failures == 0 && maps_over == 0,
            fmt("%d observed cells without line of sight; worst off-edge disagreement %.4f (limit %.2f), "
                "%d/50 maps over",
                los_failures, worst, kRaycastDisagreement, maps_over)};
}

Outcome criterion5() {
    const auto room = resolve_scenario("room");
    double field = 0.0;
    double cost = 0.0;
    double ro_field = 0.0;
    double ro_cost = 0.0;
    int missing = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        for (const StrategyKind k : {StrategyKind::Field, StrategyKind::Cost}) {
            RunConfig c;
            c.scenario = room;
            c.strategy = k;
            c.seed = seed;
            const RunMetrics single = run(c).metrics;
            if (!single.t_total) ++missing;
            (k == StrategyKind::Field ? field : cost) += single.t_total.value_or(kCompletionTimeout) / 5.0;

            c.n_robots = 2;
            c.spawn_mode = SpawnMode::Close;
            const RunMetrics pair = run(c).metrics;
            (k == StrategyKind::Field ? ro_field : ro_cost) += pair.overlap.value_or(1.0) / 5.0;
        }
    }
    const bool order_time = missing == 0 && field < cost;
    const bool order_overlap = ro_field < ro_cost;
    return {order_time && order_overlap,
            fmt("single robot mean T_total field %.1f s vs cost %.1f s (%s); two robots close spawn mean "
                "r_o field %.3f vs cost %.3f (%s)",
                field, cost, order_time ? "ok" : "field not faster", ro_field, ro_cost,
                order_overlap ? "ok" : "field not lower")};
}

Outcome criterion6() {
    const SpeedReport r = measure_speed(8, 8);
    const bool sim_ok = r.sim_time >= kMinSimSeconds && r.sim_time >= r.lower_bound &&
                        r.sim_time <= kSpeedLowerBoundSlack * r.lower_bound;
    const bool speed_ok = r.speedup >= kMinSpeedup;
    const bool batch_ok = r.batch_wall_parallel < kMaxBatchRatio * r.wall_seconds;
    return {sim_ok && speed_ok && batch_ok,
            fmt("sim %.1f s (lower bound %.1f s, %s); wall %.4f s, speedup %.0fx (%s); batch of %zu on %zu "
                "workers %.3f s vs single %.4f s (%s; %u hardware threads)",
                r.sim_time, r.lower_bound, sim_ok ? "ok" : "off", r.wall_seconds, r.speedup,
                speed_ok ? "ok" : "too slow", r.batch_runs, r.workers, r.batch_wall_parallel, r.wall_seconds,
                batch_ok ? "ok" : "over 2x", r.hardware_threads)};
}

std::vector<RunConfig> sweep_configs(bool both_spawns, double timeout) {
    std::vector<RunConfig> out;
    for (const char* name : kBuiltins) {
        for (const StrategyKind k : kStrategies) {
            for (const std::size_t n : {std::size_t{1}, std::size_t{2}}) {
                for (const SpawnMode m : {SpawnMode::Far, SpawnMode::Close}) {
                    if (!both_spawns && m == SpawnMode::Close) continue;
                    RunConfig c;
                    c.scenario = resolve_scenario(name);
                    c.strategy = k;
                    c.n_robots = n;
                    c.spawn_mode = m;
                    c.timeout = timeout;
                    out.push_back(c);
                }
            }
        }
    }
    return out;
}

Outcome criterion7() {
    const auto configs = sweep_configs(false, kCompletionTimeout);
    const auto first = run_batch(configs, 1, true);
    const auto second = run_batch(configs, 1, true);
    const auto wide = run_batch(configs, 8, true);
    int differ = 0;
    int errors = 0;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        if (!first[i].error.empty() || !second[i].error.empty() || !wide[i].error.empty()) {
            ++errors;
            continue;
        }
        const std::string a = serialize_events(*first[i].log);
        if (a != serialize_events(*second[i].log) || a != serialize_events(*wide[i].log)) ++differ;
    }
    return {differ == 0 && errors == 0,
            fmt("%zu configs x 3 executions (workers 1, 1, 8): %d logs differ, %d runs threw", configs.size(),
                differ, errors)};
}

Outcome criterion8() {
    const auto configs = sweep_configs(true, kCompletionTimeout);
    const auto results = run_batch(configs, hardware_workers());
    std::string misses;
    int short_runs = 0;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const auto& r = results[i];
        const bool ok = r.metrics && r.metrics->final_ratio >= kCompletionRatio && r.metrics->t_total &&
                        *r.metrics->t_total <= kCompletionTimeout;
        if (ok) continue;
        ++short_runs;
        const RunConfig& c = configs[i];
        misses += fmt(" [%s/%s/%zu/%s %s]", c.scenario->name.c_str(), std::string(to_string(c.strategy)).c_str(),
                      c.n_robots, std::string(to_string(c.spawn_mode)).c_str(),
                      r.metrics ? fmt("ratio %.4f", r.metrics->final_ratio).c_str() : r.error.c_str());
    }
    return {short_runs == 0, fmt("%d/%zu runs below %.0f%% coverage at %.0f s", short_runs, configs.size(),
                                 kCompletionRatio * 100.0, kCompletionTimeout) +
                                 misses};
}

Outcome criterion9() {
    int differ = 0;
    std::string detail;
    for (const std::size_t n : {std::size_t{1}, std::size_t{2}}) {
        RunConfig c;
        c.scenario = resolve_scenario("corridor");
        c.strategy = StrategyKind::Cost;
        c.n_robots = n;
        const RunMetrics want = run(c).metrics;

        Env env;
        env.reset(c);
        while (!env.engine().done()) {
            std::vector<Pose> goals;
            for (std::size_t i = 0; i < n; ++i) {
                try {
                    goals.push_back(cost_strategy(env.engine().input_for(i), c.strategy_params));
                } catch (const NoFrontier&) {
                    goals.push_back(env.engine().poses()[i]);
                }
            }
            env.step(goals);
        }
        const RunMetrics got = env.engine().metrics();
        differ += !(got == want);
        detail += fmt("%s%zu robot(s): T_total env %.1f vs run %.1f", detail.empty() ? "" : "; ", n,
                      got.t_total.value_or(-1.0), want.t_total.value_or(-1.0));
    }
    return {differ == 0, detail};
}

struct Criterion {
    int id;
    const char* name;
    double budget;  // wall seconds, 0 = none
    std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "metric formulas", kBudget1, criterion1},
        {2, "frontier oracle equivalence", kBudget2, criterion2},
        {3, "planner optimality", kBudget3, criterion3},
        {4, "raycast soundness", kBudget4, criterion4},
        {5, "strategy ordering on room", kBudget5, criterion5},
        {6, "speed", 0.0, criterion6},
        {7, "end-to-end determinism", kBudget7, criterion7},
        {8, "completion", kBudget8, criterion8},
        {9, "env / run equivalence", 0.0, criterion9},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const Criterion& c : all) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_budget = c.budget <= 0.0 || secs < c.budget;
        const bool pass = o.pass && in_budget;
        failures += !pass;
        std::printf("%s criterion %d (%s): %s; %.2f s%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs,
                    in_budget ? "" : fmt(" exceeds the %.0f s budget", c.budget).c_str());
        std::fflush(stdout);
    }
    return failures ? 1 : 0;
}
