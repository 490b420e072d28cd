#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "explore/grid.hpp"

namespace explore {

// All neighbourhood logic in the library is 4-connected unless noted.
inline constexpr std::array<Cell, 4> kNeighbors4{{{-1, 0}, {0, -1}, {0, 1}, {1, 0}}};
inline constexpr std::array<Cell, 8> kNeighbors8{
    {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}}};

inline constexpr int kUnreachable = -1;

// Bit set over CellState values.
struct StateMask {
    std::uint8_t bits = 0;

    static constexpr StateMask of(CellState s) {
        return {static_cast<std::uint8_t>(1u << static_cast<unsigned>(s))};
    }
    constexpr StateMask operator|(StateMask o) const {
        return {static_cast<std::uint8_t>(bits | o.bits)};
    }
    constexpr bool contains(CellState s) const {
        return (bits >> static_cast<unsigned>(s)) & 1u;
    }
};

inline constexpr StateMask kFreeOnly = StateMask::of(CellState::Free);

// Unit-cost 4-connected BFS hop counts from `start` over cells whose state is in
// `traversable`. Cells listed in `blocked` are treated as impassable (the
// start cell itself is always expanded). Unreached cells hold kUnreachable.
std::vector<int> bfs_distances(const OccupancyGrid& g, Cell start,
                               StateMask traversable = kFreeOnly,
                               std::span<const Cell> blocked = {});

// Labels 4-connected components of cells in `states`; other cells get -1.
// Returns the number of components.
int label_components(const OccupancyGrid& g, StateMask states, std::vector<int>& labels);

bool free_space_connected(const OccupancyGrid& g);

// Free cells plus Occupied cells 4-adjacent to a Free cell: everything a
// sensor moving through free space can ever see.
std::vector<std::uint8_t> observable_mask(const OccupancyGrid& truth);

// Distance (in cells, Chebyshev) from each cell to the nearest Occupied cell,
// capped at `cap`.
std::vector<int> obstacle_clearance(const OccupancyGrid& g, int cap);

}  // namespace explore
