#include "explore/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "explore/errors.hpp"

namespace explore {

std::vector<Cell> bresenham_line(Cell from, Cell to) {
    std::vector<Cell> out;
    int x = from.col;
    int y = from.row;
    const int dx = std::abs(to.col - from.col);
    const int dy = -std::abs(to.row - from.row);
    const int sx = from.col < to.col ? 1 : -1;
    const int sy = from.row < to.row ? 1 : -1;
    int err = dx + dy;
    out.reserve(static_cast<std::size_t>(std::max(dx, -dy)) + 1);
    while (true) {
        out.push_back({y, x});
        if (x == to.col && y == to.row) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y += sy;
        }
    }
    return out;
}

Raycaster::Raycaster(const SensorSpec& spec, double resolution)
    : spec_(spec), resolution_(resolution) {
    if (!(spec.range > 0.0)) throw ValueError("sensor range must be positive");
    if (spec.rays < 8) throw ValueError("sensor needs at least 8 rays");
    if (!(resolution > 0.0)) throw ValueError("resolution must be positive");
    const double r = spec.range / resolution;
    range_cells_ = static_cast<int>(std::floor(r + 1e-9));
    const double r2 = r * r + 1e-9;
    const auto in_disk = [r2](const Cell& c) {
        return static_cast<double>(c.row) * c.row + static_cast<double>(c.col) * c.col <= r2;
    };
    rays_.reserve(static_cast<std::size_t>(spec.rays));
    for (int k = 0; k < spec.rays; ++k) {
        const double a = 2.0 * std::numbers::pi * k / spec.rays;
        const Cell end{static_cast<int>(std::lround(2.0 * r * std::sin(a))),
                       static_cast<int>(std::lround(2.0 * r * std::cos(a)))};
        std::vector<Cell> line = bresenham_line({0, 0}, end);
        std::vector<Cell> kept;
        for (std::size_t i = 1; i < line.size() && in_disk(line[i]); ++i) kept.push_back(line[i]);
        rays_.push_back(std::move(kept));
    }
}

ScanResult Raycaster::scan(const Pose& pose, const OccupancyGrid& truth) {
    Cell origin;
    try {
        origin = world_to_cell(pose, truth);
    } catch (const OutOfBounds& e) {
        throw InvalidPose(e.what());
    }
    return scan(origin, truth);
}

ScanResult Raycaster::scan(Cell origin, const OccupancyGrid& truth) {
    if (!truth.in_bounds(origin)) throw InvalidPose("scan origin outside the grid");
    if (truth.at(origin) == CellState::Occupied) throw InvalidPose("scan origin is occupied");
    if (stamp_.size() != truth.size()) {
        stamp_.assign(truth.size(), 0);
        epoch_ = 0;
    }
    if (++epoch_ == 0) {
        std::fill(stamp_.begin(), stamp_.end(), 0);
        epoch_ = 1;
    }
    ScanResult out;
    out.width = truth.width();
    out.height = truth.height();
    const std::size_t origin_idx = truth.index(origin);
    stamp_[origin_idx] = epoch_;
    out.observed_free.push_back(origin_idx);

    const CellState* cells = truth.cells().data();
    const int w = truth.width();
    for (const auto& ray : rays_) {
        for (const Cell& off : ray) {
            const int r = origin.row + off.row;
            const int c = origin.col + off.col;
            if (!truth.in_bounds(r, c)) break;
            const std::size_t idx = static_cast<std::size_t>(r) * w + c;
            const CellState s = cells[idx];
            if (s == CellState::Unknown) break;
            if (stamp_[idx] != epoch_) {
                stamp_[idx] = epoch_;
                (s == CellState::Occupied ? out.observed_occupied : out.observed_free).push_back(idx);
            }
            if (s == CellState::Occupied) break;
        }
    }
    return out;
}

ScanResult simulate_scan(const Pose& pose, const SensorSpec& spec, const OccupancyGrid& truth) {
    Raycaster caster(spec, truth.resolution());
    return caster.scan(pose, truth);
}

std::vector<std::size_t> update_local_map(OccupancyGrid& local, const ScanResult& scan) {
    if (local.width() != scan.width || local.height() != scan.height) {
        throw DimensionMismatch("local map " + std::to_string(local.width()) + "x" +
                                std::to_string(local.height()) + " vs scan " +
                                std::to_string(scan.width) + "x" + std::to_string(scan.height));
    }
    std::vector<std::size_t> fresh;
    const auto apply = [&](const std::vector<std::size_t>& cells, CellState s) {
        for (std::size_t idx : cells) {
            if (local[idx] == CellState::Unknown) {
                local[idx] = s;
                fresh.push_back(idx);
            }
        }
    };
    apply(scan.observed_free, CellState::Free);
    apply(scan.observed_occupied, CellState::Occupied);
    return fresh;
}

OccupancyGrid merge_maps(std::span<const OccupancyGrid> locals, std::span<const CellOffset> offsets) {
    if (locals.empty()) throw InvalidInput("nothing to merge");
    if (!offsets.empty() && offsets.size() != locals.size()) {
        throw InvalidInput("one offset per local map is required");
    }
    const OccupancyGrid& first = locals.front();
    OccupancyGrid merged(first.width(), first.height(), first.resolution(), CellState::Unknown,
                         first.origin());
    for (std::size_t k = 0; k < locals.size(); ++k) {
        const OccupancyGrid& m = locals[k];
        if (m.resolution() != first.resolution() ||
            (offsets.empty() && !m.same_geometry(first))) {
            throw DimensionMismatch("local map " + std::to_string(k) +
                                    " does not share the merged geometry");
        }
        const CellOffset off = offsets.empty() ? CellOffset{} : offsets[k];
        for (int r = 0; r < m.height(); ++r) {
            for (int c = 0; c < m.width(); ++c) {
                const CellState s = m.at(r, c);
                if (s == CellState::Unknown) continue;
                const Cell dst{r + off.rows, c + off.cols};
                if (!merged.in_bounds(dst)) continue;
                CellState& d = merged.at(dst);
                if (d == CellState::Unknown) {
                    d = s;
                } else if (d != s) {
                    throw ConsistencyError("maps disagree at cell (" + std::to_string(dst.row) +
                                           ", " + std::to_string(dst.col) + ")");
                }
            }
        }
    }
    return merged;
}

}  // namespace explore
