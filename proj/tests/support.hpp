#pragma once

// Hand-rolled generators and brute-force oracles shared by the unit tests and
// the acceptance binary. Nothing here calls into the code under test except
// for the plain grid container.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <bit>
#include <filesystem>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "explore/grid.hpp"
#include "explore/random.hpp"

namespace testing {

using explore::Cell;
using explore::CellState;
using explore::OccupancyGrid;
using explore::Rng;

inline OccupancyGrid ascii(std::initializer_list<std::string_view> rows, double res = 0.1) {
    std::vector<std::string_view> v(rows);
    return explore::grid_from_ascii(v, res);
}

// ---- generators ----------------------------------------------------------------

// Free/Occupied grid, obstacle cells placed independently with probability p.
inline OccupancyGrid random_truth(Rng& rng, int w, int h, double p, bool border = true) {
    OccupancyGrid g(w, h, 0.1, CellState::Free);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const bool edge = r == 0 || c == 0 || r == h - 1 || c == w - 1;
            if ((border && edge) || explore::uniform01(rng) < p) g.at(r, c) = CellState::Occupied;
        }
    }
    return g;
}

// Obstacles as random axis-aligned blocks, closer to an indoor map than noise.
inline OccupancyGrid random_blocks(Rng& rng, int w, int h, int blocks) {
    OccupancyGrid g(w, h, 0.1, CellState::Free);
    for (int k = 0; k < blocks; ++k) {
        const int bh = explore::uniform_int(rng, 1, std::max(1, h / 5));
        const int bw = explore::uniform_int(rng, 1, std::max(1, w / 5));
        g.fill_rect(explore::uniform_int(rng, 0, h - 1), explore::uniform_int(rng, 0, w - 1), bh, bw,
                    CellState::Occupied);
    }
    g.fill_rect(0, 0, 1, w, CellState::Occupied);
    g.fill_rect(h - 1, 0, 1, w, CellState::Occupied);
    g.fill_rect(0, 0, h, 1, CellState::Occupied);
    g.fill_rect(0, w - 1, h, 1, CellState::Occupied);
    return g;
}

// Ternary map: random truth, then a random subset of cells hidden as Unknown.
// Hidden cells come in blobs so that frontiers form real clusters.
inline OccupancyGrid random_partial(Rng& rng, int w, int h) {
    OccupancyGrid g = random_truth(rng, w, h, explore::uniform(rng, 0.05, 0.35), false);
    const int blobs = explore::uniform_int(rng, 1, 8);
    for (int k = 0; k < blobs; ++k) {
        g.fill_rect(explore::uniform_int(rng, 0, h - 1), explore::uniform_int(rng, 0, w - 1),
                    explore::uniform_int(rng, 1, h / 2), explore::uniform_int(rng, 1, w / 2),
                    CellState::Unknown);
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (explore::uniform01(rng) < 0.05) g[i] = CellState::Unknown;
    }
    return g;
}

inline std::vector<Cell> free_cells(const OccupancyGrid& g) {
    std::vector<Cell> out;
    for (int r = 0; r < g.height(); ++r) {
        for (int c = 0; c < g.width(); ++c) {
            if (g.at(r, c) == CellState::Free) out.push_back({r, c});
        }
    }
    return out;
}

inline Cell pick(Rng& rng, const std::vector<Cell>& cells) {
    return cells[static_cast<std::size_t>(
        explore::uniform_int(rng, 0, static_cast<int>(cells.size()) - 1))];
}

// ---- oracles -------------------------------------------------------------------

// Plain queue BFS over Free cells, 4-connected. -1 where unreachable.
inline std::vector<int> bfs_oracle(const OccupancyGrid& g, Cell start,
                                   const std::vector<Cell>& blocked = {}) {
    std::vector<int> d(g.size(), -1);
    std::vector<char> wall(g.size(), 0);
    for (const Cell& b : blocked) {
        if (g.in_bounds(b)) wall[g.index(b)] = 1;
    }
    std::deque<Cell> q{start};
    d[g.index(start)] = 0;
    while (!q.empty()) {
        const Cell c = q.front();
        q.pop_front();
        const int dr[] = {1, -1, 0, 0};
        const int dc[] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            const Cell n{c.row + dr[k], c.col + dc[k]};
            if (!g.in_bounds(n)) continue;
            const std::size_t i = g.index(n);
            if (g[i] != CellState::Free || wall[i] || d[i] >= 0) continue;
            d[i] = d[g.index(c)] + 1;
            q.push_back(n);
        }
    }
    return d;
}

// Frontier cell definition, checked cell by cell.
inline std::set<Cell> frontier_oracle(const OccupancyGrid& m) {
    std::set<Cell> out;
    for (int r = 0; r < m.height(); ++r) {
        for (int c = 0; c < m.width(); ++c) {
            if (m.at(r, c) != CellState::Free) continue;
            const bool unknown_nb = (r > 0 && m.at(r - 1, c) == CellState::Unknown) ||
                                    (r + 1 < m.height() && m.at(r + 1, c) == CellState::Unknown) ||
                                    (c > 0 && m.at(r, c - 1) == CellState::Unknown) ||
                                    (c + 1 < m.width() && m.at(r, c + 1) == CellState::Unknown);
            if (unknown_nb) out.insert({r, c});
        }
    }
    return out;
}

// 8-connected groups of a cell set via union-find, each group sorted.
inline std::vector<std::set<Cell>> groups8(const std::set<Cell>& cells) {
    std::vector<Cell> v(cells.begin(), cells.end());
    std::map<Cell, std::size_t> at;
    for (std::size_t i = 0; i < v.size(); ++i) at[v[i]] = i;
    std::vector<std::size_t> parent(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) parent[i] = i;
    const auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                const auto it = at.find({v[i].row + dr, v[i].col + dc});
                if (it != at.end()) parent[find(i)] = find(it->second);
            }
        }
    }
    std::map<std::size_t, std::set<Cell>> by_root;
    for (std::size_t i = 0; i < v.size(); ++i) by_root[find(i)].insert(v[i]);
    std::vector<std::set<Cell>> out;
    for (auto& [root, g] : by_root) out.push_back(std::move(g));
    std::sort(out.begin(), out.end());
    return out;
}

// Dense fan: `rays` bearings, each walked along an integer Bresenham line
// aimed at twice the range (written out here, independent of the library)
// until the first Occupied cell, the grid edge, or the range disk.
inline std::set<std::size_t> dense_bresenham(const OccupancyGrid& truth, Cell origin, double range_cells,
                                             int rays = 3600) {
    std::set<std::size_t> seen{truth.index(origin)};
    const double r2 = range_cells * range_cells + 1e-9;
    for (int k = 0; k < rays; ++k) {
        const double a = 2.0 * std::numbers::pi * k / rays;
        const int er = static_cast<int>(std::lround(2.0 * range_cells * std::sin(a)));
        const int ec = static_cast<int>(std::lround(2.0 * range_cells * std::cos(a)));
        const int n = std::max(std::abs(er), std::abs(ec));
        int dr = 0;
        int dc = 0;
        int err = std::abs(ec) - std::abs(er);
        for (int step = 0; step < n; ++step) {
            const int e2 = 2 * err;
            if (e2 >= -std::abs(er)) {
                err -= std::abs(er);
                dc += ec > 0 ? 1 : -1;
            }
            if (e2 <= std::abs(ec)) {
                err += std::abs(ec);
                dr += er > 0 ? 1 : -1;
            }
            if (static_cast<double>(dr) * dr + static_cast<double>(dc) * dc > r2) break;
            const Cell c{origin.row + dr, origin.col + dc};
            if (!truth.in_bounds(c)) break;
            seen.insert(truth.index(c));
            if (truth.at(c) == CellState::Occupied) break;
        }
    }
    return seen;
}

// Cells where the two scans may legitimately differ: next to an obstacle, or
// on the boundary of either visible set (a 3x3 neighbourhood holding both
// visible and hidden cells). Shadow edges cast by obstacle corners fall here.
inline bool occlusion_edge(const OccupancyGrid& truth, const std::set<std::size_t>& a,
                           const std::set<std::size_t>& b, std::size_t idx) {
    const Cell c = truth.cell_of(idx);
    bool in_a = false, out_a = false, in_b = false, out_b = false;
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            const Cell n{c.row + dr, c.col + dc};
            if (!truth.in_bounds(n)) continue;
            if ((dr || dc) && truth.at(n) == CellState::Occupied) return true;
            const std::size_t k = truth.index(n);
            (a.count(k) ? in_a : out_a) = true;
            (b.count(k) ? in_b : out_b) = true;
        }
    }
    return (in_a && out_a) || (in_b && out_b);
}

// Cells in exactly one of the two sets, not counting occlusion-edge cells.
inline std::size_t off_edge_disagreement(const OccupancyGrid& truth, const std::set<std::size_t>& a,
                                         const std::set<std::size_t>& b) {
    std::size_t n = 0;
    for (const std::size_t idx : a) n += !b.count(idx) && !occlusion_edge(truth, a, b, idx);
    for (const std::size_t idx : b) n += !a.count(idx) && !occlusion_edge(truth, a, b, idx);
    return n;
}

inline double sigma_oracle(const std::vector<double>& a) {
    long double mean = 0;
    for (double x : a) mean += x;
    mean /= static_cast<long double>(a.size());
    long double ss = 0;
    for (double x : a) ss += (x - mean) * (x - mean);
    return static_cast<double>(std::sqrt(ss / static_cast<long double>(a.size())));
}

// sum |K_i| - |union K_i| via inclusion-exclusion over all non-empty subsets:
// |union| = sum over subsets S of (-1)^(|S|+1) |intersection of S|.
inline double overlap_oracle(const std::vector<std::vector<std::size_t>>& sets, std::size_t total) {
    const std::size_t n = sets.size();
    long long sum = 0;
    for (const auto& s : sets) sum += static_cast<long long>(s.size());
    long long uni = 0;
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        std::vector<std::size_t> inter;
        bool first = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(mask >> i & 1u)) continue;
            std::vector<std::size_t> s = sets[i];
            std::sort(s.begin(), s.end());
            if (first) {
                inter = s;
                first = false;
            } else {
                std::vector<std::size_t> next;
                std::set_intersection(inter.begin(), inter.end(), s.begin(), s.end(),
                                      std::back_inserter(next));
                inter = std::move(next);
            }
        }
        const int bits = std::popcount(mask);
        uni += (bits % 2 ? 1 : -1) * static_cast<long long>(inter.size());
    }
    return static_cast<double>(sum - uni) / static_cast<double>(total);
}

// Narrow passage segments: Free cells whose Free run across one axis is
// bounded by Occupied cells on both ends and shorter than max_width, grouped
// 4-connected per axis; a group counts when it extends at least min_length
// along the other axis.
inline int narrow_segments(const OccupancyGrid& g, int max_width, int min_length) {
    int segments = 0;
    for (int axis = 0; axis < 2; ++axis) {
        std::vector<char> narrow(g.size(), 0);
        const int lines = axis == 0 ? g.width() : g.height();
        const int len = axis == 0 ? g.height() : g.width();
        const auto at = [&](int line, int k) {
            return axis == 0 ? Cell{k, line} : Cell{line, k};
        };
        for (int line = 0; line < lines; ++line) {
            int k = 0;
            while (k < len) {
                if (g.at(at(line, k)) != CellState::Free) {
                    ++k;
                    continue;
                }
                int e = k;
                while (e < len && g.at(at(line, e)) == CellState::Free) ++e;
                const bool bounded = k > 0 && e < len;
                if (bounded && e - k < max_width) {
                    for (int j = k; j < e; ++j) narrow[g.index(at(line, j))] = 1;
                }
                k = e;
            }
        }
        std::vector<char> done(g.size(), 0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!narrow[i] || done[i]) continue;
            int lo = 1 << 30;
            int hi = -1;
            std::deque<std::size_t> q{i};
            done[i] = 1;
            while (!q.empty()) {
                const Cell c = g.cell_of(q.front());
                q.pop_front();
                const int along = axis == 0 ? c.col : c.row;
                lo = std::min(lo, along);
                hi = std::max(hi, along);
                for (const Cell d : {Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}}) {
                    const Cell n{c.row + d.row, c.col + d.col};
                    if (!g.in_bounds(n)) continue;
                    const std::size_t j = g.index(n);
                    if (narrow[j] && !done[j]) {
                        done[j] = 1;
                        q.push_back(j);
                    }
                }
            }
            if (hi - lo + 1 >= min_length) ++segments;
        }
    }
    return segments;
}

// Occupied 8-connected components that do not touch the grid border. Each one
// is an island that free space runs around, i.e. a loop.
inline int obstacle_islands(const OccupancyGrid& g) {
    std::vector<char> done(g.size(), 0);
    int islands = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] != CellState::Occupied || done[i]) continue;
        bool border = false;
        std::deque<std::size_t> q{i};
        done[i] = 1;
        while (!q.empty()) {
            const Cell c = g.cell_of(q.front());
            q.pop_front();
            if (c.row == 0 || c.col == 0 || c.row == g.height() - 1 || c.col == g.width() - 1) {
                border = true;
            }
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    const Cell n{c.row + dr, c.col + dc};
                    if (!g.in_bounds(n)) continue;
                    const std::size_t j = g.index(n);
                    if (g[j] == CellState::Occupied && !done[j]) {
                        done[j] = 1;
                        q.push_back(j);
                    }
                }
            }
        }
        if (!border) ++islands;
    }
    return islands;
}

// Single 4-connected Free component, by flood fill.
inline bool free_connected(const OccupancyGrid& g) {
    const auto cells = free_cells(g);
    if (cells.empty()) return false;
    const auto d = bfs_oracle(g, cells.front());
    return std::all_of(cells.begin(), cells.end(), [&](Cell c) { return d[g.index(c)] >= 0; });
}

// Fully Free side x side squares whose one-cell surrounding ring is at least
// `ring_occupied` Occupied (doors leave gaps). Squares are counted once per
// top-left corner, so a larger open area yields several hits.
inline int enclosed_squares(const OccupancyGrid& g, int side, double ring_occupied) {
    const int w = g.width();
    const int h = g.height();
    std::vector<int> pre(static_cast<std::size_t>((w + 1) * (h + 1)), 0);
    const auto P = [&](int r, int c) -> int& { return pre[static_cast<std::size_t>(r * (w + 1) + c)]; };
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            P(r + 1, c + 1) = P(r, c + 1) + P(r + 1, c) - P(r, c) + (g.at(r, c) == CellState::Free);
        }
    }
    const auto free_in = [&](int r0, int c0, int rows, int cols) {
        return P(r0 + rows, c0 + cols) - P(r0, c0 + cols) - P(r0 + rows, c0) + P(r0, c0);
    };
    int count = 0;
    for (int r = 1; r + side < h; ++r) {
        for (int c = 1; c + side < w; ++c) {
            if (free_in(r, c, side, side) != side * side) continue;
            const int ring = 4 * side + 4;
            const int ring_free = free_in(r - 1, c - 1, side + 2, side + 2) - side * side;
            if (ring - ring_free >= ring_occupied * ring) ++count;
        }
    }
    return count;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("explore_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace testing
