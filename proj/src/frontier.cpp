#include "explore/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "explore/connectivity.hpp"

namespace explore {

namespace {

bool is_frontier(const OccupancyGrid& map, int r, int c) {
    if (map.at(r, c) != CellState::Free) return false;
    for (const Cell& n : kNeighbors4) {
        const int rr = r + n.row;
        const int cc = c + n.col;
        if (map.in_bounds(rr, cc) && map.at(rr, cc) == CellState::Unknown) return true;
    }
    return false;
}

}  // namespace

std::vector<Cell> frontier_cells(const OccupancyGrid& map) {
    std::vector<Cell> out;
    for (int r = 0; r < map.height(); ++r) {
        for (int c = 0; c < map.width(); ++c) {
            if (is_frontier(map, r, c)) out.push_back({r, c});
        }
    }
    return out;
}

std::vector<Frontier> detect_frontiers(const OccupancyGrid& map, const FrontierParams& params) {
    std::vector<std::uint8_t> mark(map.size(), 0);
    for (const Cell& c : frontier_cells(map)) mark[map.index(c)] = 1;

    UnknownDiskCounter gain(map, params.gain_range);
    std::vector<Frontier> out;
    std::vector<std::size_t> stack;
    for (std::size_t seed = 0; seed < map.size(); ++seed) {
        if (mark[seed] != 1) continue;
        mark[seed] = 2;
        stack.push_back(seed);
        Frontier f;
        while (!stack.empty()) {
            const Cell c = map.cell_of(stack.back());
            stack.pop_back();
            f.cells.push_back(c);
            for (const Cell& n : kNeighbors8) {
                const Cell nc{c.row + n.row, c.col + n.col};
                if (!map.in_bounds(nc) || mark[map.index(nc)] != 1) continue;
                mark[map.index(nc)] = 2;
                stack.push_back(map.index(nc));
            }
        }
        if (static_cast<int>(f.cells.size()) < params.min_cluster) continue;
        std::sort(f.cells.begin(), f.cells.end());
        double mr = 0.0;
        double mc = 0.0;
        for (const Cell& c : f.cells) {
            mr += c.row;
            mc += c.col;
        }
        mr /= static_cast<double>(f.cells.size());
        mc /= static_cast<double>(f.cells.size());
        double best = std::numeric_limits<double>::infinity();
        for (const Cell& c : f.cells) {
            const double d = (c.row - mr) * (c.row - mr) + (c.col - mc) * (c.col - mc);
            if (d < best) {  // strict: first (lowest index) wins ties
                best = d;
                f.centroid = c;
            }
        }
        f.gain = gain.count(f.centroid);
        out.push_back(std::move(f));
    }
    std::sort(out.begin(), out.end(),
              [](const Frontier& a, const Frontier& b) { return a.centroid < b.centroid; });
    return out;
}

UnknownDiskCounter::UnknownDiskCounter(const OccupancyGrid& map, double radius_m)
    : width_(map.width()), height_(map.height()) {
    const double r = radius_m / map.resolution();
    const int rc = static_cast<int>(std::floor(r + 1e-9));
    half_width_.resize(static_cast<std::size_t>(2 * rc + 1));
    for (int dr = -rc; dr <= rc; ++dr) {
        half_width_[dr + rc] =
            static_cast<int>(std::floor(std::sqrt(std::max(0.0, r * r - dr * dr)) + 1e-9));
    }
    prefix_.assign(static_cast<std::size_t>(height_) * (width_ + 1), 0);
    for (int row = 0; row < height_; ++row) {
        int* p = &prefix_[static_cast<std::size_t>(row) * (width_ + 1)];
        for (int col = 0; col < width_; ++col) {
            p[col + 1] = p[col] + (map.at(row, col) == CellState::Unknown ? 1 : 0);
        }
    }
}

int UnknownDiskCounter::count(Cell center) const {
    const int rc = static_cast<int>(half_width_.size() / 2);
    int total = 0;
    for (int dr = -rc; dr <= rc; ++dr) {
        const int row = center.row + dr;
        if (row < 0 || row >= height_) continue;
        const int hw = half_width_[dr + rc];
        const int lo = std::max(0, center.col - hw);
        const int hi = std::min(width_, center.col + hw + 1);
        if (lo >= hi) continue;
        const int* p = &prefix_[static_cast<std::size_t>(row) * (width_ + 1)];
        total += p[hi] - p[lo];
    }
    return total;
}

}  // namespace explore
