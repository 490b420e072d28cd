#include "explore/motion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <queue>
#include <tuple>

#include "explore/connectivity.hpp"
#include "explore/errors.hpp"

namespace explore {

namespace {

struct OpenEntry {
    int f;
    int h;
    int row;
    int col;

    // std::priority_queue is a max-heap; invert for lexicographic minimum.
    bool operator<(const OpenEntry& o) const {
        return std::tie(f, h, row, col) > std::tie(o.f, o.h, o.row, o.col);
    }
};

std::vector<std::uint8_t> passable_mask(const OccupancyGrid& map, const PlanOptions& options,
                                        std::span<const Cell> blocked) {
    std::vector<std::uint8_t> ok(map.size(), 0);
    for (std::size_t i = 0; i < map.size(); ++i) {
        const CellState s = map[i];
        ok[i] = s == CellState::Free || (options.allow_unknown && s == CellState::Unknown);
    }
    if (options.inflate) {
        std::vector<std::uint8_t> inflated = ok;
        for (std::size_t i = 0; i < map.size(); ++i) {
            if (map[i] != CellState::Occupied) continue;
            const Cell c = map.cell_of(i);
            for (const Cell& n : kNeighbors8) {
                const Cell nc{c.row + n.row, c.col + n.col};
                if (map.in_bounds(nc)) inflated[map.index(nc)] = 0;
            }
        }
        ok = std::move(inflated);
    }
    for (const Cell& b : blocked) {
        if (map.in_bounds(b)) ok[map.index(b)] = 0;
    }
    return ok;
}

}  // namespace

PlannedPath plan(Cell start, Cell goal, const OccupancyGrid& map, const PlanOptions& options,
                 std::span<const Cell> blocked) {
    if (!map.in_bounds(start) || map.at(start) != CellState::Free) {
        throw InvalidStart("start cell must be a known Free cell");
    }
    if (!map.in_bounds(goal)) throw OutOfBounds("goal cell outside the grid");
    if (!(options.v_max > 0.0)) throw ValueError("v_max must be positive");

    std::vector<std::uint8_t> ok = passable_mask(map, options, blocked);
    ok[map.index(start)] = 1;
    if (options.inflate && map.at(goal) == CellState::Free) ok[map.index(goal)] = 1;
    if (!ok[map.index(goal)]) throw NoPath("goal cell is not traversable");

    const auto heuristic = [&](int r, int c) {
        return std::abs(r - goal.row) + std::abs(c - goal.col);
    };
    constexpr int kInf = std::numeric_limits<int>::max();
    std::vector<int> g(map.size(), kInf);
    std::vector<std::int64_t> parent(map.size(), -1);
    std::vector<std::uint8_t> closed(map.size(), 0);
    std::priority_queue<OpenEntry> open;
    g[map.index(start)] = 0;
    open.push({heuristic(start.row, start.col), heuristic(start.row, start.col), start.row,
               start.col});

    bool found = false;
    while (!open.empty()) {
        const OpenEntry top = open.top();
        open.pop();
        const Cell cur{top.row, top.col};
        const std::size_t cur_idx = map.index(cur);
        if (closed[cur_idx]) continue;
        closed[cur_idx] = 1;
        if (cur == goal) {
            found = true;
            break;
        }
        const int next_g = g[cur_idx] + 1;
        for (const Cell& d : kNeighbors4) {
            const Cell n{cur.row + d.row, cur.col + d.col};
            if (!map.in_bounds(n)) continue;
            const std::size_t n_idx = map.index(n);
            if (!ok[n_idx] || closed[n_idx] || next_g >= g[n_idx]) continue;
            g[n_idx] = next_g;
            parent[n_idx] = static_cast<std::int64_t>(cur_idx);
            const int h = heuristic(n.row, n.col);
            open.push({next_g + h, h, n.row, n.col});
        }
    }
    if (!found) throw NoPath("goal unreachable from start");

    PlannedPath path;
    path.resolution = map.resolution();
    path.origin = map.origin();
    path.v_max = options.v_max;
    for (std::int64_t idx = static_cast<std::int64_t>(map.index(goal)); idx >= 0;
         idx = parent[static_cast<std::size_t>(idx)]) {
        path.cells.push_back(map.cell_of(static_cast<std::size_t>(idx)));
    }
    std::reverse(path.cells.begin(), path.cells.end());
    path.length = static_cast<double>(path.cells.size() - 1) * map.resolution();
    path.est_time = path.length / options.v_max;
    return path;
}

double heading_at(const PlannedPath& path, std::size_t index) {
    if (index == 0 || index >= path.cells.size()) return 0.0;
    const Cell& a = path.cells[index - 1];
    const Cell& b = path.cells[index];
    return std::atan2(static_cast<double>(b.row - a.row), static_cast<double>(b.col - a.col));
}

StepResult step_along(const PlannedPath& path, std::size_t index, double clock, double budget) {
    if (!(budget > 0.0)) throw ValueError("step budget must be positive");
    if (path.cells.empty()) throw InvalidInput("empty path");
    const double cell_time = path.resolution / path.v_max;
    const auto affordable = static_cast<std::size_t>(std::floor(budget / cell_time + 1e-9));
    const std::size_t last = path.cells.size() - 1;
    const std::size_t target = std::min(last, std::min(index, last) + affordable);

    StepResult out;
    out.index = target;
    out.cells_moved = target - std::min(index, last);
    out.clock = clock + static_cast<double>(out.cells_moved) * cell_time;
    out.done = target == last;
    const Cell& c = path.cells[target];
    out.pose = {path.origin.x + (c.col + 0.5) * path.resolution,
                path.origin.y + (c.row + 0.5) * path.resolution,
                heading_at(path, target)};
    return out;
}

}  // namespace explore
