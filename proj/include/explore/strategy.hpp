#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "explore/frontier.hpp"
#include "explore/grid.hpp"
#include "explore/random.hpp"

namespace explore {

enum class StrategyKind { Cost, Sample, Field, Goal };

std::string_view to_string(StrategyKind k);
StrategyKind parse_strategy(std::string_view name);  // "cost" | "sample" | "field" | "goal"

// What every strategy sees: the merged map and all robot poses.
struct StrategyInput {
    const OccupancyGrid& merged_map;
    std::span<const Pose> poses;
    std::size_t self = 0;
};

struct StrategyParams {
    FrontierParams frontier{};

    // cost
    bool euclidean_cost = false;  // straight-line instead of path distance

    // field
    double lambda_d = 3.0;  // m, attraction decay
    double lambda_r = 3.0;  // m, repulsion decay
    std::optional<double> repulsion_weight;  // default: median frontier gain

    // sample
    double rrt_step = 1.0;           // m
    int rrt_iterations = 200;        // growth iterations per decision
    double rrt_revenue_weight = 1.0; // path cells per unit of gain
    std::size_t rrt_max_nodes = 20000;

    // goal (built-in global goal provider used by run())
    int goal_hold_decisions = 15;
};

// Frontiers plus the robot's BFS distance field over Free cells of the merged
// map. Only frontiers whose centroid is reachable are kept.
struct FrontierView {
    std::vector<Frontier> frontiers;
    std::vector<int> self_distance;  // hop counts, kUnreachable if cut off
    Cell self_cell;
};

FrontierView view_frontiers(const StrategyInput& in, const StrategyParams& params);

// Nearest frontier (path distance by default).
Pose cost_strategy(const StrategyInput& in, const StrategyParams& params = {});

// U(f) = gain * exp(-d_self / lambda_d) - sum_j w_r * exp(-d_j / lambda_r),
// one entry per frontier of view_frontiers().
std::vector<double> field_scores(const StrategyInput& in, const FrontierView& view,
                                 const StrategyParams& params);
Pose field_strategy(const StrategyInput& in, const StrategyParams& params = {});

// Frontier centroid closest (Euclidean) to an externally supplied goal.
Pose goal_conditioned_strategy(const StrategyInput& in, const Pose& global_goal,
                               const StrategyParams& params = {});

// ---- sample (RRT) ------------------------------------------------------------

class RrtTree {
public:
    RrtTree() = default;
    RrtTree(Point2 root, double bucket_size);

    void reset(Point2 root);
    std::size_t add(Point2 p, std::size_t parent);
    // Index of the node closest to p.
    std::size_t nearest(Point2 p) const;

    std::size_t size() const noexcept { return nodes_.size(); }
    const Point2& node(std::size_t i) const { return nodes_[i]; }
    std::size_t parent(std::size_t i) const { return parents_[i]; }

private:
    std::pair<int, int> bucket_of(Point2 p) const;
    static long long key(int bx, int by) {
        return (static_cast<long long>(bx) << 32) ^ static_cast<unsigned int>(by);
    }

    double bucket_ = 1.0;
    std::vector<Point2> nodes_;
    std::vector<std::size_t> parents_;
    std::unordered_map<long long, std::vector<std::size_t>> buckets_;
    int min_bx_ = 0;
    int max_bx_ = 0;
    int min_by_ = 0;
    int max_by_ = 0;
};

struct RrtState {
    RrtTree global_tree;
    RrtTree local_tree;
    std::vector<Point2> candidates;  // raw frontier detections, world frame
    Rng rng;
    bool initialized = false;
};

RrtState make_rrt_state(std::uint64_t seed, std::size_t robot);

Pose sample_strategy(const StrategyInput& in, RrtState& state, const StrategyParams& params = {});

// Snapped frontier cells currently held as candidates (for inspection).
std::vector<Cell> rrt_candidate_cells(const StrategyInput& in, const RrtState& state,
                                      const StrategyParams& params);

// ---- per-robot strategy instances --------------------------------------------

// Supplies global goals to the goal-conditioned strategy.
using GoalProvider = std::function<Pose(const StrategyInput&)>;

// Stand-in for a learned policy: holds a seeded random Unknown cell as the
// global goal for a number of decisions, resampling once it becomes known.
GoalProvider make_random_goal_provider(std::uint64_t seed, std::size_t robot, int hold_decisions);

class Explorer {
public:
    virtual ~Explorer() = default;
    virtual StrategyKind kind() const = 0;
    // Throws NoFrontier when nothing reachable is left to explore.
    virtual Pose select(const StrategyInput& in) = 0;
};

std::unique_ptr<Explorer> make_explorer(StrategyKind kind, const StrategyParams& params,
                                        std::uint64_t seed, std::size_t robot,
                                        GoalProvider provider = {});

}  // namespace explore
