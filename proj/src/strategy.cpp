#include "explore/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "explore/connectivity.hpp"
#include "explore/errors.hpp"
#include "explore/sensing.hpp"

namespace explore {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Cell robot_cell(const StrategyInput& in, std::size_t robot) {
    try {
        return world_to_cell(in.poses[robot], in.merged_map);
    } catch (const OutOfBounds& e) {
        throw StrategyError("robot " + std::to_string(robot) + " pose: " + e.what());
    }
}

void check_input(const StrategyInput& in) {
    if (in.poses.empty()) throw StrategyError("no robot poses");
    if (in.self >= in.poses.size()) throw StrategyError("self index out of range");
}

Pose center_of(Cell c, const OccupancyGrid& g) { return cell_to_world(c, g); }

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Free / Occupied / Unknown along the straight segment a -> b (world frame).
enum class SegmentStatus { Free, Obstacle, Unknown };

struct SegmentCheck {
    SegmentStatus status = SegmentStatus::Free;
    Cell first_unknown{};
};

SegmentCheck check_segment(const OccupancyGrid& map, Point2 a, Point2 b) {
    const auto to_cell = [&](Point2 p) {
        return Cell{static_cast<int>(std::floor((p.y - map.origin().y) / map.resolution())),
                    static_cast<int>(std::floor((p.x - map.origin().x) / map.resolution()))};
    };
    SegmentCheck out;
    for (const Cell& c : bresenham_line(to_cell(a), to_cell(b))) {
        if (!map.in_bounds(c)) {
            out.status = SegmentStatus::Obstacle;
            return out;
        }
        const CellState s = map.at(c);
        if (s == CellState::Occupied) {
            out.status = SegmentStatus::Obstacle;
            return out;
        }
        if (s == CellState::Unknown) {
            out.status = SegmentStatus::Unknown;
            out.first_unknown = c;
            return out;
        }
    }
    return out;
}

struct Snapped {
    Cell cell;
    double dist2;
};

// Nearest frontier cell (Euclidean, cell units) to a world point; ties go to
// the lowest row-major index.
std::optional<Snapped> snap(const std::vector<Frontier>& frontiers, const OccupancyGrid& map,
                            Point2 p) {
    const double pr = (p.y - map.origin().y) / map.resolution() - 0.5;
    const double pc = (p.x - map.origin().x) / map.resolution() - 0.5;
    std::optional<Snapped> best;
    for (const Frontier& f : frontiers) {
        for (const Cell& c : f.cells) {
            const double d = (c.row - pr) * (c.row - pr) + (c.col - pc) * (c.col - pc);
            if (!best || d < best->dist2 || (d == best->dist2 && c < best->cell)) {
                best = Snapped{c, d};
            }
        }
    }
    return best;
}

}  // namespace

std::string_view to_string(StrategyKind k) {
    switch (k) {
        case StrategyKind::Cost: return "cost";
        case StrategyKind::Sample: return "sample";
        case StrategyKind::Field: return "field";
        case StrategyKind::Goal: return "goal";
    }
    return "?";
}

StrategyKind parse_strategy(std::string_view name) {
    if (name == "cost") return StrategyKind::Cost;
    if (name == "sample") return StrategyKind::Sample;
    if (name == "field") return StrategyKind::Field;
    if (name == "goal") return StrategyKind::Goal;
    throw UnknownName("strategy '" + std::string(name) + "' (expected cost|sample|field|goal)");
}

FrontierView view_frontiers(const StrategyInput& in, const StrategyParams& params) {
    check_input(in);
    FrontierView view;
    view.self_cell = robot_cell(in, in.self);
    view.self_distance = bfs_distances(in.merged_map, view.self_cell);
    for (Frontier& f : detect_frontiers(in.merged_map, params.frontier)) {
        if (view.self_distance[in.merged_map.index(f.centroid)] != kUnreachable) {
            view.frontiers.push_back(std::move(f));
        }
    }
    return view;
}

Pose cost_strategy(const StrategyInput& in, const StrategyParams& params) {
    const FrontierView view = view_frontiers(in, params);
    if (view.frontiers.empty()) throw NoFrontier("no reachable frontier");
    const OccupancyGrid& map = in.merged_map;
    double best = kInf;
    const Frontier* pick = nullptr;
    for (const Frontier& f : view.frontiers) {
        const double d =
            params.euclidean_cost
                ? std::hypot(f.centroid.row - view.self_cell.row, f.centroid.col - view.self_cell.col)
                : static_cast<double>(view.self_distance[map.index(f.centroid)]);
        if (d < best) {
            best = d;
            pick = &f;
        }
    }
    return center_of(pick->centroid, map);
}

std::vector<double> field_scores(const StrategyInput& in, const FrontierView& view,
                                 const StrategyParams& params) {
    const OccupancyGrid& map = in.merged_map;
    const double res = map.resolution();
    double w_r = 0.0;
    if (params.repulsion_weight) {
        w_r = *params.repulsion_weight;
    } else {
        std::vector<double> gains;
        for (const Frontier& f : view.frontiers) gains.push_back(f.gain);
        w_r = median(std::move(gains));
    }
    std::vector<std::vector<int>> others;
    if (w_r != 0.0) {
        for (std::size_t j = 0; j < in.poses.size(); ++j) {
            if (j != in.self) others.push_back(bfs_distances(map, robot_cell(in, j)));
        }
    }
    std::vector<double> scores;
    scores.reserve(view.frontiers.size());
    for (const Frontier& f : view.frontiers) {
        const std::size_t idx = map.index(f.centroid);
        const double d_self = view.self_distance[idx] * res;
        double u = f.gain * std::exp(-d_self / params.lambda_d);
        for (const auto& dist : others) {
            if (dist[idx] == kUnreachable) continue;
            u -= w_r * std::exp(-dist[idx] * res / params.lambda_r);
        }
        scores.push_back(u);
    }
    return scores;
}

Pose field_strategy(const StrategyInput& in, const StrategyParams& params) {
    const FrontierView view = view_frontiers(in, params);
    if (view.frontiers.empty()) throw NoFrontier("no reachable frontier");
    const std::vector<double> scores = field_scores(in, view, params);
    std::size_t pick = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[pick]) pick = i;
    }
    return center_of(view.frontiers[pick].centroid, in.merged_map);
}

Pose goal_conditioned_strategy(const StrategyInput& in, const Pose& global_goal,
                               const StrategyParams& params) {
    const FrontierView view = view_frontiers(in, params);
    if (view.frontiers.empty()) throw NoFrontier("no reachable frontier");
    double best = kInf;
    const Frontier* pick = nullptr;
    for (const Frontier& f : view.frontiers) {
        const Pose c = center_of(f.centroid, in.merged_map);
        const double d = std::hypot(c.x - global_goal.x, c.y - global_goal.y);
        if (d < best) {
            best = d;
            pick = &f;
        }
    }
    return center_of(pick->centroid, in.merged_map);
}

// ---- RRT ---------------------------------------------------------------------

RrtTree::RrtTree(Point2 root, double bucket_size) : bucket_(bucket_size) { reset(root); }

void RrtTree::reset(Point2 root) {
    nodes_.clear();
    parents_.clear();
    buckets_.clear();
    const auto [bx, by] = bucket_of(root);
    min_bx_ = max_bx_ = bx;
    min_by_ = max_by_ = by;
    add(root, 0);
}

std::pair<int, int> RrtTree::bucket_of(Point2 p) const {
    return {static_cast<int>(std::floor(p.x / bucket_)), static_cast<int>(std::floor(p.y / bucket_))};
}

std::size_t RrtTree::add(Point2 p, std::size_t parent) {
    const std::size_t idx = nodes_.size();
    nodes_.push_back(p);
    parents_.push_back(idx == 0 ? 0 : parent);
    const auto [bx, by] = bucket_of(p);
    buckets_[key(bx, by)].push_back(idx);
    min_bx_ = std::min(min_bx_, bx);
    max_bx_ = std::max(max_bx_, bx);
    min_by_ = std::min(min_by_, by);
    max_by_ = std::max(max_by_, by);
    return idx;
}

std::size_t RrtTree::nearest(Point2 p) const {
    const auto [bx, by] = bucket_of(p);
    double best = kInf;
    std::size_t pick = 0;
    const auto visit = [&](int x, int y) {
        const auto it = buckets_.find(key(x, y));
        if (it == buckets_.end()) return;
        for (std::size_t i : it->second) {
            const double d = std::hypot(nodes_[i].x - p.x, nodes_[i].y - p.y);
            if (d < best || (d == best && i < pick)) {
                best = d;
                pick = i;
            }
        }
    };
    const int max_ring = std::max({std::abs(bx - min_bx_), std::abs(bx - max_bx_),
                                   std::abs(by - min_by_), std::abs(by - max_by_)});
    for (int ring = 0; ring <= max_ring; ++ring) {
        if (ring == 0) {
            visit(bx, by);
        } else {
            for (int x = bx - ring; x <= bx + ring; ++x) {
                visit(x, by - ring);
                visit(x, by + ring);
            }
            for (int y = by - ring + 1; y <= by + ring - 1; ++y) {
                visit(bx - ring, y);
                visit(bx + ring, y);
            }
        }
        // Anything in ring+1 or beyond is at least ring * bucket away.
        if (best <= ring * bucket_) break;
    }
    return pick;
}

RrtState make_rrt_state(std::uint64_t seed, std::size_t robot) {
    RrtState s;
    s.rng = make_rng(seed, 0xA11CE000ULL + robot);
    return s;
}

namespace {

// Grows one tree by a single sample. Returns true when the steering segment ran
// into Unknown space (a frontier detection).
bool extend(RrtTree& tree, const OccupancyGrid& map, Point2 sample, double step, bool add_nodes,
            std::vector<Point2>& detections) {
    const std::size_t near = tree.nearest(sample);
    const Point2 from = tree.node(near);
    const double dx = sample.x - from.x;
    const double dy = sample.y - from.y;
    const double len = std::hypot(dx, dy);
    if (len < 1e-9) return false;
    const double k = std::min(1.0, step / len);
    const Point2 to{from.x + dx * k, from.y + dy * k};
    const SegmentCheck check = check_segment(map, from, to);
    if (check.status == SegmentStatus::Unknown) {
        const Pose p = cell_to_world(check.first_unknown, map);
        detections.push_back({p.x, p.y});
        return true;
    }
    if (check.status == SegmentStatus::Free && add_nodes) tree.add(to, near);
    return false;
}

struct Scored {
    Cell cell;
    double revenue;
};

}  // namespace

std::vector<Cell> rrt_candidate_cells(const StrategyInput& in, const RrtState& state,
                                      const StrategyParams& params) {
    const FrontierView view = view_frontiers(in, params);
    const double max_snap2 = std::pow(params.rrt_step / in.merged_map.resolution(), 2.0);
    std::vector<Cell> out;
    for (const Point2& p : state.candidates) {
        const auto s = snap(view.frontiers, in.merged_map, p);
        if (s && s->dist2 <= max_snap2) out.push_back(s->cell);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Pose sample_strategy(const StrategyInput& in, RrtState& state, const StrategyParams& params) {
    check_input(in);
    const OccupancyGrid& map = in.merged_map;
    const Pose& self = in.poses[in.self];
    const Point2 root{self.x, self.y};
    if (!state.initialized) {
        state.global_tree = RrtTree(root, params.rrt_step);
        state.local_tree = RrtTree(root, params.rrt_step);
        state.initialized = true;
    }
    const double x0 = map.origin().x;
    const double y0 = map.origin().y;
    const double x1 = x0 + map.width() * map.resolution();
    const double y1 = y0 + map.height() * map.resolution();

    std::vector<Point2> detections;
    for (int it = 0; it < params.rrt_iterations; ++it) {
        const Point2 sample{uniform(state.rng, x0, x1), uniform(state.rng, y0, y1)};
        extend(state.global_tree, map, sample, params.rrt_step,
               state.global_tree.size() < params.rrt_max_nodes, detections);
        if (extend(state.local_tree, map, sample, params.rrt_step, true, detections)) {
            state.local_tree.reset(root);
        }
    }
    state.candidates.insert(state.candidates.end(), detections.begin(), detections.end());

    const FrontierView view = view_frontiers(in, params);
    if (view.frontiers.empty()) {
        state.candidates.clear();
        throw NoFrontier("no reachable frontier");
    }
    UnknownDiskCounter gain(map, params.frontier.gain_range);
    const double max_snap2 = std::pow(params.rrt_step / map.resolution(), 2.0);

    // Re-snap every held detection; drop those whose frontier has vanished.
    std::vector<Point2> kept;
    std::vector<Cell> cells;
    for (const Point2& p : state.candidates) {
        const auto s = snap(view.frontiers, map, p);
        if (!s || s->dist2 > max_snap2) continue;
        kept.push_back(p);
        cells.push_back(s->cell);
    }
    state.candidates = std::move(kept);
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

    std::vector<Scored> scored;
    for (const Cell& c : cells) {
        const int d = view.self_distance[map.index(c)];
        if (d == kUnreachable) continue;
        scored.push_back({c, params.rrt_revenue_weight * gain.count(c) - d});
    }
    if (scored.empty()) {
        // No tree detections this round: fall back to the detected frontiers.
        for (const Frontier& f : view.frontiers) {
            scored.push_back({f.centroid, params.rrt_revenue_weight * f.gain -
                                              view.self_distance[map.index(f.centroid)]});
        }
    }
    const Scored* pick = &scored.front();
    for (const Scored& s : scored) {
        if (s.revenue > pick->revenue) pick = &s;
    }
    return center_of(pick->cell, map);
}

// ---- explorers -----------------------------------------------------------------

GoalProvider make_random_goal_provider(std::uint64_t seed, std::size_t robot, int hold_decisions) {
    struct State {
        Rng rng;
        std::optional<Cell> goal;
        int age = 0;
    };
    auto state = std::make_shared<State>();
    state->rng = make_rng(seed, 0x60A1000ULL + robot);
    return [state, hold_decisions](const StrategyInput& in) {
        const OccupancyGrid& map = in.merged_map;
        const bool stale = !state->goal || state->age >= hold_decisions ||
                           map.at(*state->goal) != CellState::Unknown;
        if (stale) {
            std::vector<std::size_t> unknown;
            for (std::size_t i = 0; i < map.size(); ++i) {
                if (map[i] == CellState::Unknown) unknown.push_back(i);
            }
            const std::size_t pick =
                unknown.empty()
                    ? static_cast<std::size_t>(uniform_int(state->rng, 0, static_cast<int>(map.size()) - 1))
                    : unknown[static_cast<std::size_t>(
                          uniform_int(state->rng, 0, static_cast<int>(unknown.size()) - 1))];
            state->goal = map.cell_of(pick);
            state->age = 0;
        }
        ++state->age;
        return cell_to_world(*state->goal, map);
    };
}

namespace {

class CostExplorer final : public Explorer {
public:
    explicit CostExplorer(StrategyParams p) : params_(std::move(p)) {}
    StrategyKind kind() const override { return StrategyKind::Cost; }
    Pose select(const StrategyInput& in) override { return cost_strategy(in, params_); }

private:
    StrategyParams params_;
};

class FieldExplorer final : public Explorer {
public:
    explicit FieldExplorer(StrategyParams p) : params_(std::move(p)) {}
    StrategyKind kind() const override { return StrategyKind::Field; }
    Pose select(const StrategyInput& in) override { return field_strategy(in, params_); }

private:
    StrategyParams params_;
};

class SampleExplorer final : public Explorer {
public:
    SampleExplorer(StrategyParams p, std::uint64_t seed, std::size_t robot)
        : params_(std::move(p)), state_(make_rrt_state(seed, robot)) {}
    StrategyKind kind() const override { return StrategyKind::Sample; }
    Pose select(const StrategyInput& in) override { return sample_strategy(in, state_, params_); }

private:
    StrategyParams params_;
    RrtState state_;
};

class GoalExplorer final : public Explorer {
public:
    GoalExplorer(StrategyParams p, GoalProvider provider)
        : params_(std::move(p)), provider_(std::move(provider)) {}
    StrategyKind kind() const override { return StrategyKind::Goal; }
    Pose select(const StrategyInput& in) override {
        return goal_conditioned_strategy(in, provider_(in), params_);
    }

private:
    StrategyParams params_;
    GoalProvider provider_;
};

}  // namespace

std::unique_ptr<Explorer> make_explorer(StrategyKind kind, const StrategyParams& params,
                                        std::uint64_t seed, std::size_t robot,
                                        GoalProvider provider) {
    switch (kind) {
        case StrategyKind::Cost: return std::make_unique<CostExplorer>(params);
        case StrategyKind::Field: return std::make_unique<FieldExplorer>(params);
        case StrategyKind::Sample: return std::make_unique<SampleExplorer>(params, seed, robot);
        case StrategyKind::Goal:
            if (!provider) {
                provider = make_random_goal_provider(seed, robot, params.goal_hold_decisions);
            }
            return std::make_unique<GoalExplorer>(params, std::move(provider));
    }
    throw UnknownName("strategy kind");
}

}  // namespace explore
