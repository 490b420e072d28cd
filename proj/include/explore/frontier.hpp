#pragma once

#include <cstddef>
#include <vector>

#include "explore/grid.hpp"

namespace explore {

struct Frontier {
    std::vector<Cell> cells;  // row-major order
    Cell centroid;            // member cell closest to the mean position
    int gain = 0;             // Unknown cells within sensor range of the centroid
};

struct FrontierParams {
    int min_cluster = 3;
    double gain_range = 7.0;  // m
};

// Free cells with at least one 4-adjacent Unknown cell, row-major.
std::vector<Cell> frontier_cells(const OccupancyGrid& map);

// Frontier cells grouped under 8-adjacency; groups smaller than min_cluster
// are dropped. Sorted by centroid row-major index.
std::vector<Frontier> detect_frontiers(const OccupancyGrid& map, const FrontierParams& params = {});

// Counts Unknown cells inside disks of a fixed radius. Build once per map
// state; each query costs O(radius).
class UnknownDiskCounter {
public:
    UnknownDiskCounter(const OccupancyGrid& map, double radius_m);

    int count(Cell center) const;

private:
    int width_;
    int height_;
    std::vector<int> half_width_;  // per row offset -radius..radius
    std::vector<int> prefix_;      // per row, width + 1 entries
};

}  // namespace explore
