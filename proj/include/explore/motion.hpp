#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "explore/grid.hpp"

namespace explore {

inline constexpr double kDefaultMaxSpeed = 1.0;  // m/s

struct PlanOptions {
    bool allow_unknown = false;  // treat Unknown cells as traversable
    bool inflate = false;        // keep one cell away from Occupied cells
    double v_max = kDefaultMaxSpeed;
};

struct PlannedPath {
    std::vector<Cell> cells;  // start first, 4-adjacent steps
    double length = 0.0;      // m
    double est_time = 0.0;    // s
    double resolution = kDefaultResolution;
    Point2 origin{};
    double v_max = kDefaultMaxSpeed;
};

// A* over the 4-connected grid with unit step cost and Manhattan heuristic.
// Open-list ties are broken lexicographically on (f, h, row, col), so the
// returned path is a pure function of the inputs. `blocked` cells are treated
// as Occupied. Throws InvalidStart, OutOfBounds (goal) or NoPath.
PlannedPath plan(Cell start, Cell goal, const OccupancyGrid& map, const PlanOptions& options = {},
                 std::span<const Cell> blocked = {});

struct StepResult {
    Pose pose;
    std::size_t index = 0;  // position along path.cells
    std::size_t cells_moved = 0;
    double clock = 0.0;
    bool done = false;
};

// Teleport-style execution: jumps floor(budget * v_max / resolution) cells
// along the path, charging resolution / v_max seconds per cell.
StepResult step_along(const PlannedPath& path, std::size_t index, double clock, double budget);

// Heading of the step entering path.cells[index] (0 for the first cell).
double heading_at(const PlannedPath& path, std::size_t index);

}  // namespace explore
