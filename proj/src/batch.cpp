#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "explore/connectivity.hpp"
#include "explore/engine.hpp"
#include "explore/errors.hpp"
#include "json.hpp"

namespace explore {

std::vector<BatchItem> run_batch(std::span<const RunConfig> configs, std::size_t workers,
                                 bool keep_logs) {
    if (workers < 1) throw ValueError("run_batch needs at least one worker");
    std::vector<BatchItem> results(configs.size());
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            BatchItem& item = results[i];
            try {
                Engine engine(configs[i]);
                engine.run_to_end();
                item.metrics = engine.metrics();
                item.log_digest = fnv1a(serialize_events(engine.log()));
                if (keep_logs) item.log = engine.log();
            } catch (const std::exception& e) {
                item.error = e.what();
            }
        }
    };
    const std::size_t n = std::min(workers, configs.size());
    if (n <= 1) {
        work();
        return results;
    }
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (std::size_t w = 0; w < n; ++w) pool.emplace_back(work);
    pool.clear();
    return results;
}

std::size_t worker_cap(std::size_t requested) {
    std::size_t n = std::max<std::size_t>(requested, 1);
    if (const char* env = std::getenv("EXPLORE_BENCH_WORKERS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap >= 1) n = std::min(n, static_cast<std::size_t>(cap));
    }
    return n;
}

// ---- speed task ---------------------------------------------------------------------

namespace {

constexpr int kSpeedLength = 190;  // interior cells along x
constexpr int kSpeedWidth = 16;    // interior cells along y
constexpr int kSpeedWall = 2;

RunConfig speed_config(std::shared_ptr<const Scenario> s, std::uint64_t seed) {
    RunConfig c;
    c.scenario = std::move(s);
    c.strategy = StrategyKind::Cost;
    c.spawn_mode = SpawnMode::Explicit;
    c.seed = seed;
    return c;
}

// Shortest straight-line travel after which the cells still out of sensor
// reach fit inside the coverage slack.
double speed_lower_bound(const RunConfig& c) {
    const OccupancyGrid& g = c.scenario->ground_truth;
    const auto mask = observable_mask(g);
    const Cell start = world_to_cell(c.scenario->spawns.front(), g);
    std::vector<std::size_t> per_col(static_cast<std::size_t>(g.width()), 0);
    std::size_t total = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!mask[i]) continue;
        ++per_col[static_cast<std::size_t>(g.cell_of(i).col)];
        ++total;
    }
    const double slack = (1.0 - c.target_ratio) * static_cast<double>(total);
    const int reach = static_cast<int>(std::floor(c.sensor.range / g.resolution() + 1e-9));
    for (int travel = 0; travel < g.width(); ++travel) {
        std::size_t beyond = 0;
        for (int col = start.col + travel + reach + 1; col < g.width(); ++col) {
            beyond += per_col[static_cast<std::size_t>(col)];
        }
        if (static_cast<double>(beyond) <= slack) return travel * g.resolution() / c.v_max;
    }
    return 0.0;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Scenario speed_corridor() {
    const int w = kSpeedLength + 2 * kSpeedWall;
    const int h = kSpeedWidth + 2 * kSpeedWall;
    Scenario s;
    s.name = "speed_corridor";
    s.ground_truth = OccupancyGrid(w, h, kDefaultResolution, CellState::Occupied);
    s.ground_truth.fill_rect(kSpeedWall, kSpeedWall, kSpeedWidth, kSpeedLength, CellState::Free);
    s.spawns.push_back(cell_to_world({h / 2, kSpeedWall}, s.ground_truth));
    s.gen.kind = ScenarioKind::Corridor;
    s.gen.extent_x = w * kDefaultResolution;
    s.gen.extent_y = h * kDefaultResolution;
    s.gen.params.jitter = false;
    validate(s);
    return s;
}

SpeedReport measure_speed(std::size_t batch_runs, std::size_t workers) {
    const auto scenario = std::make_shared<const Scenario>(speed_corridor());
    SpeedReport r;
    r.batch_runs = batch_runs;
    r.workers = workers;
    r.hardware_threads = std::thread::hardware_concurrency();

    const RunConfig config = speed_config(scenario, 0);
    r.lower_bound = speed_lower_bound(config);
    // Median of five single runs.
    std::vector<double> walls;
    for (int rep = 0; rep < 5; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        const RunOutput out = run(config);
        walls.push_back(seconds_since(t0));
        r.sim_time = out.metrics.sim_time;
    }
    std::sort(walls.begin(), walls.end());
    r.wall_seconds = walls[walls.size() / 2];
    r.speedup = r.wall_seconds > 0.0 ? r.sim_time / r.wall_seconds : 0.0;

    std::vector<RunConfig> batch;
    for (std::size_t i = 0; i < batch_runs; ++i) batch.push_back(speed_config(scenario, i));
    auto t0 = std::chrono::steady_clock::now();
    run_batch(batch, 1);
    r.batch_wall_serial = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    run_batch(batch, workers);
    r.batch_wall_parallel = seconds_since(t0);
    return r;
}

std::string speed_report_json(const SpeedReport& r) {
    nlohmann::json j;
    j["sim_time_s"] = r.sim_time;
    j["sim_time_lower_bound_s"] = r.lower_bound;
    j["wall_clock_s"] = r.wall_seconds;
    j["speedup"] = r.speedup;
    j["batch_runs"] = r.batch_runs;
    j["workers"] = r.workers;
    j["batch_wall_serial_s"] = r.batch_wall_serial;
    j["batch_wall_parallel_s"] = r.batch_wall_parallel;
    j["batch_throughput_gain"] =
        r.batch_wall_parallel > 0.0 ? r.batch_wall_serial / r.batch_wall_parallel : 0.0;
    j["hardware_threads"] = r.hardware_threads;
    return j.dump(2) + "\n";
}

}  // namespace explore
