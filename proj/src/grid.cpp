#include "explore/grid.hpp"

#include <algorithm>
#include <cmath>

#include "explore/errors.hpp"

namespace explore {

OccupancyGrid::OccupancyGrid(int width, int height, double resolution, CellState fill,
                             Point2 origin)
    : width_(width), height_(height), resolution_(resolution), origin_(origin) {
    if (width <= 0 || height <= 0) {
        throw ValueError("grid dimensions must be positive");
    }
    if (!(resolution > 0.0)) {
        throw ValueError("resolution must be positive");
    }
    cells_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

void OccupancyGrid::fill_rect(int row0, int col0, int rows, int cols, CellState s) {
    const int r_begin = std::max(row0, 0);
    const int c_begin = std::max(col0, 0);
    const int r_end = std::min(row0 + rows, height_);
    const int c_end = std::min(col0 + cols, width_);
    for (int r = r_begin; r < r_end; ++r) {
        for (int c = c_begin; c < c_end; ++c) {
            at(r, c) = s;
        }
    }
}

bool OccupancyGrid::same_geometry(const OccupancyGrid& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ &&
           resolution_ == other.resolution_ && origin_ == other.origin_;
}

Cell world_to_cell(const Pose& p, const OccupancyGrid& g) {
    // Small slack so that exact multiples of the resolution (1.0 / 0.1) land in
    // the intended cell despite binary rounding.
    constexpr double kSlack = 1e-9;
    const double fx = (p.x - g.origin().x) / g.resolution();
    const double fy = (p.y - g.origin().y) / g.resolution();
    const auto col = static_cast<long long>(std::floor(fx + kSlack));
    const auto row = static_cast<long long>(std::floor(fy + kSlack));
    if (fx < -kSlack || fy < -kSlack || col >= g.width() || row >= g.height()) {
        throw OutOfBounds("pose (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                          ") outside grid extent");
    }
    return {static_cast<int>(row), static_cast<int>(col)};
}

Pose cell_to_world(Cell c, const OccupancyGrid& g) {
    return {g.origin().x + (c.col + 0.5) * g.resolution(),
            g.origin().y + (c.row + 0.5) * g.resolution(), 0.0};
}

std::size_t count_state(const OccupancyGrid& g, CellState s) {
    return static_cast<std::size_t>(std::count(g.cells().begin(), g.cells().end(), s));
}

double area_of(const OccupancyGrid& g, CellState s) {
    return static_cast<double>(count_state(g, s)) * g.resolution() * g.resolution();
}

char state_char(CellState s) noexcept {
    switch (s) {
        case CellState::Free: return '.';
        case CellState::Occupied: return '#';
        case CellState::Unknown: return '?';
    }
    return '?';
}

OccupancyGrid grid_from_ascii(std::span<const std::string_view> rows, double resolution) {
    if (rows.empty() || rows.front().empty()) {
        throw ValueError("empty ascii grid");
    }
    const int width = static_cast<int>(rows.front().size());
    OccupancyGrid g(width, static_cast<int>(rows.size()), resolution);
    for (int r = 0; r < g.height(); ++r) {
        if (static_cast<int>(rows[r].size()) != width) {
            throw ValueError("ragged ascii grid");
        }
        for (int c = 0; c < width; ++c) {
            switch (rows[r][c]) {
                case '.': g.at(r, c) = CellState::Free; break;
                case '#': g.at(r, c) = CellState::Occupied; break;
                case '?': g.at(r, c) = CellState::Unknown; break;
                default: throw ValueError(std::string("bad ascii cell '") + rows[r][c] + "'");
            }
        }
    }
    return g;
}

std::string grid_to_ascii(const OccupancyGrid& g) {
    std::string out;
    out.reserve(g.size() + static_cast<std::size_t>(g.height()));
    for (int r = 0; r < g.height(); ++r) {
        for (int c = 0; c < g.width(); ++c) out.push_back(state_char(g.at(r, c)));
        out.push_back('\n');
    }
    return out;
}

}  // namespace explore
