#include "explore/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "explore/connectivity.hpp"
#include "explore/errors.hpp"
#include "explore/motion.hpp"

namespace explore {

namespace {

std::int64_t whole_ticks(double seconds, const RunConfig& c) {
    return static_cast<std::int64_t>(
        std::floor(seconds * c.v_max / c.scenario->ground_truth.resolution() + 1e-9));
}

}  // namespace

void validate_config(const RunConfig& c) {
    if (!c.scenario) throw InvalidConfig("scenario is not set");
    if (c.n_robots < 1) throw InvalidConfig("n_robots must be at least 1");
    if (!(c.v_max > 0.0)) throw InvalidConfig("v_max must be positive");
    if (!(c.decision_period > 0.0)) throw InvalidConfig("decision_period must be positive");
    if (whole_ticks(c.decision_period, c) < 1) {
        throw InvalidConfig("decision_period shorter than one cell of motion");
    }
    if (!(c.timeout > 0.0)) throw InvalidConfig("timeout must be positive");
    if (!(c.topo_ratio > 0.0 && c.topo_ratio < c.target_ratio && c.target_ratio <= 1.0)) {
        throw InvalidConfig("ratios must satisfy 0 < topo_ratio < target_ratio <= 1");
    }
    if (!(c.sensor.range > 0.0) || c.sensor.rays < 8) {
        throw InvalidConfig("sensor needs range > 0 and at least 8 rays");
    }
    if (c.spawn_mode == SpawnMode::Explicit) {
        const std::size_t available = c.spawns.empty() ? c.scenario->spawns.size() : c.spawns.size();
        if (c.n_robots > available) {
            throw InvalidConfig("n_robots " + std::to_string(c.n_robots) + " exceeds the " +
                                std::to_string(available) + " explicit spawns");
        }
    }
}

std::uint64_t config_hash(const RunConfig& c) {
    std::ostringstream os;
    os.precision(17);
    const Scenario& s = *c.scenario;
    const OccupancyGrid& g = s.ground_truth;
    os << "scenario=" << s.name << ';' << g.width() << 'x' << g.height() << '@' << g.resolution()
       << ';' << g.origin().x << ',' << g.origin().y << ";grid=" << std::hex
       << fnv1a(std::string_view(reinterpret_cast<const char*>(g.cells().data()), g.size()))
       << std::dec << ";spawns=";
    for (const Pose& p : s.spawns) os << p.x << ',' << p.y << ',' << p.theta << ';';
    const StrategyParams& sp = c.strategy_params;
    os << "n=" << c.n_robots << ";strategy=" << to_string(c.strategy)
       << ";min_cluster=" << sp.frontier.min_cluster << ";gain_range=" << sp.frontier.gain_range
       << ";euclid=" << sp.euclidean_cost << ";ld=" << sp.lambda_d << ";lr=" << sp.lambda_r
       << ";wr=" << (sp.repulsion_weight ? std::to_string(*sp.repulsion_weight) : "median")
       << ";rrt=" << sp.rrt_step << ',' << sp.rrt_iterations << ',' << sp.rrt_revenue_weight << ','
       << sp.rrt_max_nodes << ";hold=" << sp.goal_hold_decisions << ";range=" << c.sensor.range
       << ";rays=" << c.sensor.rays << ";v=" << c.v_max << ";period=" << c.decision_period
       << ";target=" << c.target_ratio << ";topo=" << c.topo_ratio << ";timeout=" << c.timeout
       << ";seed=" << c.seed << ";spawn=" << to_string(c.spawn_mode) << ";explicit=";
    for (const Pose& p : c.spawns) os << p.x << ',' << p.y << ',' << p.theta << ';';
    return fnv1a(os.str());
}

std::vector<Pose> resolve_spawns(const RunConfig& c) {
    const int n = static_cast<int>(c.n_robots);
    if (c.spawn_mode == SpawnMode::Explicit) {
        const std::vector<Pose>& src = c.spawns.empty() ? c.scenario->spawns : c.spawns;
        return {src.begin(), src.begin() + n};
    }
    return place_spawns(c.scenario->ground_truth, n, c.spawn_mode, c.seed);
}

// ---- Engine --------------------------------------------------------------------

namespace {

RunConfig validated(RunConfig c) {
    validate_config(c);
    return c;
}

}  // namespace

Engine::Engine(RunConfig config)
    : config_(validated(std::move(config))),
      raycaster_(config_.sensor, config_.scenario->ground_truth.resolution()) {
    const OccupancyGrid& g = truth();
    observable_ = observable_mask(g);
    observable_count_ = static_cast<std::size_t>(std::count(observable_.begin(), observable_.end(), 1));
    if (observable_count_ == 0) throw InvalidConfig("scenario has no observable cells");
    merged_ = OccupancyGrid(g.width(), g.height(), g.resolution(), CellState::Unknown, g.origin());
    ticks_per_period_ = whole_ticks(config_.decision_period, config_);
    timeout_ticks_ = whole_ticks(config_.timeout, config_);

    log_.width = g.width();
    log_.height = g.height();
    log_.resolution = g.resolution();

    const std::vector<Pose> spawns = resolve_spawns(config_);
    for (std::size_t i = 0; i < spawns.size(); ++i) {
        Cell c;
        try {
            c = world_to_cell(spawns[i], g);
        } catch (const OutOfBounds&) {
            throw InvalidConfig("spawn " + std::to_string(i) + " lies outside the map");
        }
        if (g.at(c) != CellState::Free) {
            throw InvalidConfig("spawn " + std::to_string(i) + " is not on a Free cell");
        }
        for (const Robot& r : robots_) {
            if (r.cell == c) throw InvalidConfig("two spawns share a cell");
        }
        Robot r;
        r.cell = c;
        r.local = OccupancyGrid(g.width(), g.height(), g.resolution(), CellState::Unknown, g.origin());
        r.explorer = make_explorer(config_.strategy, config_.strategy_params, config_.seed, i);
        robots_.push_back(std::move(r));
        const Pose center = cell_to_world(c, g);
        poses_.push_back({center.x, center.y, spawns[i].theta});
    }
    for (std::size_t i = 0; i < robots_.size(); ++i) {
        trajectory_.push_back({0.0, static_cast<std::uint32_t>(i), poses_[i]});
        observe(i);
    }
    sample_coverage(true);
    if (coverage() >= config_.target_ratio) finish(Termination::Complete);
}

double Engine::time() const noexcept {
    return static_cast<double>(ticks_) * truth().resolution() / config_.v_max;
}

double Engine::coverage() const noexcept {
    return static_cast<double>(covered_) / static_cast<double>(observable_count_);
}

StrategyInput Engine::input_for(std::size_t robot) const {
    if (robot >= robots_.size()) throw InvalidInput("robot index out of range");
    return StrategyInput{merged_, poses_, robot};
}

void Engine::observe(std::size_t i) {
    const OccupancyGrid& g = truth();
    const ScanResult scan = raycaster_.scan(robots_[i].cell, g);
    const double t = time();
    for (const std::size_t idx : update_local_map(robots_[i].local, scan)) {
        Event e;
        e.kind = EventKind::Observation;
        e.t = t;
        e.robot = static_cast<std::uint32_t>(i);
        e.cell = idx;
        e.state = g[idx];
        log_.events.push_back(e);
        if (merged_[idx] == CellState::Unknown) {
            merged_[idx] = g[idx];
            if (observable_[idx]) ++covered_;
        }
    }
}

void Engine::sample_coverage(bool force) {
    const double t = time();
    const double ratio = coverage();
    if (!curve_.samples.empty() && curve_.samples.back().time == t) {
        curve_.samples.back().ratio = ratio;
        return;
    }
    if (force || curve_.samples.empty() || curve_.samples.back().ratio != ratio) {
        curve_.samples.push_back({t, ratio});
    }
}

void Engine::finish(Termination reason) {
    sample_coverage(true);
    termination_ = reason;
    Event e;
    e.kind = EventKind::Termination;
    e.t = time();
    e.reason = reason;
    log_.events.push_back(e);
}

bool Engine::occupied_by_other(Cell c, std::size_t self) const {
    for (std::size_t j = 0; j < robots_.size(); ++j) {
        if (j != self && robots_[j].cell == c) return true;
    }
    return false;
}

std::vector<std::optional<Pose>> Engine::decide() {
    std::vector<std::optional<Pose>> goals(robots_.size());
    if (done()) return goals;
    for (std::size_t i = 0; i < robots_.size(); ++i) {
        try {
            goals[i] = robots_[i].explorer->select(input_for(i));
        } catch (const NoFrontier&) {
            goals[i].reset();
        } catch (const StrategyError& e) {
            throw StrategyError("robot " + std::to_string(i) + " at t=" + std::to_string(time()) +
                                ": " + e.what());
        }
    }
    return goals;
}

void Engine::advance(std::span<const std::optional<Pose>> goals) {
    if (done()) return;
    if (goals.size() != robots_.size()) {
        throw InvalidInput("expected " + std::to_string(robots_.size()) + " goals, got " +
                           std::to_string(goals.size()));
    }
    if (std::none_of(goals.begin(), goals.end(), [](const auto& g) { return g.has_value(); })) {
        finish(Termination::NoFrontier);
        return;
    }
    if (ticks_ >= timeout_ticks_) {
        finish(Termination::Timeout);
        return;
    }

    const OccupancyGrid& g = truth();
    PlanOptions options;
    options.v_max = config_.v_max;
    std::vector<Cell> blocked;
    for (std::size_t i = 0; i < robots_.size(); ++i) {
        Robot& r = robots_[i];
        r.path.clear();
        r.path_index = 0;
        if (!goals[i]) continue;
        Event e;
        e.kind = EventKind::Goal;
        e.t = time();
        e.robot = static_cast<std::uint32_t>(i);
        e.pose = *goals[i];
        log_.events.push_back(e);

        blocked.clear();
        for (std::size_t j = 0; j < robots_.size(); ++j) {
            if (j != i) blocked.push_back(robots_[j].cell);
        }
        try {
            const Cell goal = world_to_cell(*goals[i], merged_);
            r.path = plan(r.cell, goal, merged_, options, blocked).cells;
        } catch (const OutOfBounds&) {
        } catch (const NoPath&) {
        }
    }

    const double step_time = g.resolution() / config_.v_max;
    for (std::int64_t k = 0; k < ticks_per_period_; ++k) {
        if (ticks_ >= timeout_ticks_) {
            finish(Termination::Timeout);
            return;
        }
        ++ticks_;
        const double t = time();
        for (std::size_t i = 0; i < robots_.size(); ++i) {
            Robot& r = robots_[i];
            if (r.path_index + 1 >= r.path.size()) continue;
            const Cell next = r.path[r.path_index + 1];
            if (occupied_by_other(next, i)) continue;
            const double heading = std::atan2(static_cast<double>(next.row - r.cell.row),
                                              static_cast<double>(next.col - r.cell.col));
            r.cell = next;
            ++r.path_index;
            const Pose center = cell_to_world(next, g);
            poses_[i] = {center.x, center.y, heading};

            Event e;
            e.kind = EventKind::Move;
            e.t = t;
            e.robot = static_cast<std::uint32_t>(i);
            e.cell = g.index(next);
            e.elapsed = step_time;
            log_.events.push_back(e);
            trajectory_.push_back({t, static_cast<std::uint32_t>(i), poses_[i]});
            observe(i);
        }
        sample_coverage(k + 1 == ticks_per_period_);
        if (coverage() >= config_.target_ratio) {
            finish(Termination::Complete);
            return;
        }
    }
}

void Engine::run_to_end() {
    while (!done()) {
        const auto goals = decide();
        advance(goals);
    }
}

std::vector<std::vector<std::size_t>> Engine::known_sets() const {
    std::vector<std::vector<std::size_t>> out(robots_.size());
    for (std::size_t i = 0; i < robots_.size(); ++i) {
        const OccupancyGrid& local = robots_[i].local;
        for (std::size_t idx = 0; idx < local.size(); ++idx) {
            if (observable_[idx] && local[idx] != CellState::Unknown) out[i].push_back(idx);
        }
    }
    return out;
}

RunMetrics Engine::metrics() const {
    RunMetrics m;
    m.t_topo = time_at_ratio(curve_, config_.topo_ratio);
    m.t_total = time_at_ratio(curve_, config_.target_ratio);
    const double cell_area = truth().resolution() * truth().resolution();
    const auto known = known_sets();
    for (const auto& k : known) m.areas.push_back(static_cast<double>(k.size()) * cell_area);
    m.sigma = sigma(m.areas);
    if (known.size() >= 2) m.overlap = overlap_ratio(known, observable_count_);
    m.s_total = static_cast<double>(observable_count_) * cell_area;
    m.final_ratio = coverage();
    m.sim_time = time();
    m.termination = termination_.value_or(Termination::Timeout);
    m.seed = config_.seed;
    m.config_hash = config_hash(config_);
    m.n_robots = robots_.size();
    m.scenario = config_.scenario->name;
    m.strategy = std::string(to_string(config_.strategy));
    m.spawn_mode = std::string(to_string(config_.spawn_mode));
    return m;
}

RunOutput run(const RunConfig& config) {
    Engine engine(config);
    engine.run_to_end();
    return RunOutput{engine.metrics(), engine.log(), engine.coverage_curve(), engine.trajectory(),
                     engine.merged_map()};
}

// ---- Env ---------------------------------------------------------------------------

bool clamp_to_grid(Pose& p, const OccupancyGrid& g) {
    const double res = g.resolution();
    const double x_hi = g.origin().x + g.width() * res;
    const double y_hi = g.origin().y + g.height() * res;
    bool moved = false;
    if (!(p.x >= g.origin().x)) {
        p.x = g.origin().x + 0.5 * res;
        moved = true;
    } else if (!(p.x < x_hi)) {
        p.x = x_hi - 0.5 * res;
        moved = true;
    }
    if (!(p.y >= g.origin().y)) {
        p.y = g.origin().y + 0.5 * res;
        moved = true;
    } else if (!(p.y < y_hi)) {
        p.y = y_hi - 0.5 * res;
        moved = true;
    }
    return moved;
}

EnvObservation Env::reset(const RunConfig& config) {
    engine_ = std::make_unique<Engine>(config);
    return observation();
}

const Engine& Env::engine() const {
    if (!engine_) throw NotReset("env_reset has not been called");
    return *engine_;
}

EnvObservation Env::observation() const {
    EnvObservation o;
    o.merged_map = engine_->merged_map();
    o.poses.assign(engine_->poses().begin(), engine_->poses().end());
    o.coverage = engine_->coverage();
    o.time = engine_->time();
    return o;
}

EnvStep Env::step(std::span<const Pose> goals) {
    if (!engine_) throw NotReset("env_step before env_reset");
    const std::size_t n = engine_->robot_count();
    if (goals.size() != n) {
        throw InvalidInput("expected " + std::to_string(n) + " goals, got " +
                           std::to_string(goals.size()));
    }
    EnvStep out;
    out.info.clamped.assign(n, false);
    out.info.no_frontier.assign(n, false);
    if (!engine_->done()) {
        std::vector<std::optional<Pose>> chosen(n);
        for (std::size_t i = 0; i < n; ++i) {
            Pose goal = goals[i];
            out.info.clamped[i] = clamp_to_grid(goal, engine_->merged_map());
            try {
                chosen[i] = goal_conditioned_strategy(engine_->input_for(i), goal,
                                                      engine_->config().strategy_params);
            } catch (const NoFrontier&) {
                out.info.no_frontier[i] = true;
            }
        }
        engine_->advance(chosen);
    }
    out.obs = observation();
    out.done = engine_->done();
    out.info.termination = engine_->termination();
    return out;
}

}  // namespace explore
