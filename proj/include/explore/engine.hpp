#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "explore/events.hpp"
#include "explore/grid.hpp"
#include "explore/metrics.hpp"
#include "explore/motion.hpp"
#include "explore/scenario.hpp"
#include "explore/sensing.hpp"
#include "explore/strategy.hpp"

namespace explore {

struct RunConfig {
    std::shared_ptr<const Scenario> scenario;
    std::size_t n_robots = 1;
    StrategyKind strategy = StrategyKind::Cost;
    StrategyParams strategy_params{};
    SensorSpec sensor{};
    double v_max = kDefaultMaxSpeed;  // m/s
    double decision_period = 1.0;     // s
    double target_ratio = 0.99;
    double topo_ratio = 0.90;
    double timeout = 3000.0;  // s
    std::uint64_t seed = 0;
    SpawnMode spawn_mode = SpawnMode::Far;
    // Explicit mode: these poses, or the scenario's own spawns when empty.
    std::vector<Pose> spawns;
};

// Throws InvalidConfig naming the offending field.
void validate_config(const RunConfig& config);

// FNV-1a over a canonical text form of every field that affects a run.
std::uint64_t config_hash(const RunConfig& config);

std::vector<Pose> resolve_spawns(const RunConfig& config);

struct TrajectoryPoint {
    double t = 0.0;
    std::uint32_t robot = 0;
    Pose pose{};
};

// One simulation instance. Time advances in ticks of resolution / v_max (one
// cell of motion); a decision period is a whole number of ticks. Robots move
// in lock-step rounds in index order; a robot waits when its next cell holds
// another robot. A robot scans after every move, and each scan updates its
// local map, the merged map and the coverage count. Single-threaded.
class Engine {
public:
    explicit Engine(RunConfig config);

    const RunConfig& config() const noexcept { return config_; }
    const OccupancyGrid& truth() const noexcept { return config_.scenario->ground_truth; }
    const OccupancyGrid& merged_map() const noexcept { return merged_; }
    const OccupancyGrid& local_map(std::size_t robot) const { return robots_.at(robot).local; }
    std::span<const Pose> poses() const noexcept { return poses_; }
    std::size_t robot_count() const noexcept { return robots_.size(); }

    double time() const noexcept;
    double coverage() const noexcept;
    std::size_t observable_cells() const noexcept { return observable_count_; }
    bool done() const noexcept { return termination_.has_value(); }
    std::optional<Termination> termination() const noexcept { return termination_; }

    StrategyInput input_for(std::size_t robot) const;

    // Goals from this engine's own explorers; nullopt where a robot has no
    // reachable frontier.
    std::vector<std::optional<Pose>> decide();

    // Plans towards the given goals (other robots' cells blocked) and runs one
    // decision period. All-nullopt goals end the run with NoFrontier. A goal
    // that cannot be planned to leaves that robot idle for the period.
    void advance(std::span<const std::optional<Pose>> goals);

    // decide() + advance() until done.
    void run_to_end();

    RunMetrics metrics() const;
    const EventLog& log() const noexcept { return log_; }
    const CoverageCurve& coverage_curve() const noexcept { return curve_; }
    const std::vector<TrajectoryPoint>& trajectory() const noexcept { return trajectory_; }

    // Per-robot observed cells restricted to the observable set.
    std::vector<std::vector<std::size_t>> known_sets() const;

private:
    struct Robot {
        Cell cell;
        OccupancyGrid local;
        std::vector<Cell> path;
        std::size_t path_index = 0;
        std::unique_ptr<Explorer> explorer;
    };

    void observe(std::size_t robot);
    void sample_coverage(bool force);
    void finish(Termination reason);
    bool occupied_by_other(Cell c, std::size_t self) const;

    RunConfig config_;
    Raycaster raycaster_;
    std::vector<std::uint8_t> observable_;
    std::size_t observable_count_ = 0;
    std::size_t covered_ = 0;
    OccupancyGrid merged_;
    std::vector<Robot> robots_;
    std::vector<Pose> poses_;
    std::int64_t ticks_ = 0;
    std::int64_t ticks_per_period_ = 1;
    std::int64_t timeout_ticks_ = 0;
    std::optional<Termination> termination_;
    EventLog log_;
    CoverageCurve curve_;
    std::vector<TrajectoryPoint> trajectory_;
};

struct RunOutput {
    RunMetrics metrics;
    EventLog log;
    CoverageCurve coverage;
    std::vector<TrajectoryPoint> trajectory;
    OccupancyGrid final_map;
};

// Run to completion. Timeouts are reported in the metrics, not thrown.
RunOutput run(const RunConfig& config);

// ---- episodic environment ----------------------------------------------------

struct EnvObservation {
    OccupancyGrid merged_map;
    std::vector<Pose> poses;
    double coverage = 0.0;
    double time = 0.0;
};

struct EnvInfo {
    std::vector<bool> clamped;      // goal was outside the map and got clamped
    std::vector<bool> no_frontier;  // robot had nothing reachable to explore
    std::optional<Termination> termination;
};

struct EnvStep {
    EnvObservation obs;
    bool done = false;
    EnvInfo info;
};

// External goals are routed through the goal-conditioned strategy, one
// decision period per step.
class Env {
public:
    EnvObservation reset(const RunConfig& config);
    // Throws NotReset before reset(); InvalidInput when goals.size() differs
    // from the robot count.
    EnvStep step(std::span<const Pose> goals);

    bool ready() const noexcept { return engine_ != nullptr; }
    const Engine& engine() const;

private:
    EnvObservation observation() const;

    std::unique_ptr<Engine> engine_;
};

// Clamps to the centre of the nearest in-bounds cell. Returns true if moved.
bool clamp_to_grid(Pose& p, const OccupancyGrid& g);

// ---- batches ------------------------------------------------------------------

struct BatchItem {
    std::optional<RunMetrics> metrics;
    std::string error;  // set when the run threw
    std::uint64_t log_digest = 0;
    std::optional<EventLog> log;
};

// Results in config order, independent of the worker count. Errors are caught
// per config.
std::vector<BatchItem> run_batch(std::span<const RunConfig> configs, std::size_t workers,
                                 bool keep_logs = false);

// min(requested, EXPLORE_BENCH_WORKERS) when that variable is set, at least 1.
std::size_t worker_cap(std::size_t requested);

// ---- speed task ---------------------------------------------------------------

// Straight corridor whose far end lies beyond sensor range of the spawn.
Scenario speed_corridor();

struct SpeedReport {
    double sim_time = 0.0;         // s, single run
    double lower_bound = 0.0;      // s, distance that must be driven / v_max
    double wall_seconds = 0.0;     // single run
    double speedup = 0.0;          // sim_time / wall_seconds
    std::size_t batch_runs = 0;
    std::size_t workers = 0;
    double batch_wall_serial = 0.0;    // batch_runs runs on one worker
    double batch_wall_parallel = 0.0;  // same runs on `workers`
    unsigned hardware_threads = 0;
};

SpeedReport measure_speed(std::size_t batch_runs = 8, std::size_t workers = 8);
std::string speed_report_json(const SpeedReport& r);

}  // namespace explore
