#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "explore/grid.hpp"

namespace explore {

struct SensorSpec {
    double range = 7.0;  // m
    int rays = 720;      // per 360 degree sweep

    bool operator==(const SensorSpec&) const = default;
};

// Linear cell indices (row * width + col) of one sweep, each listed once.
struct ScanResult {
    int width = 0;
    int height = 0;
    std::vector<std::size_t> observed_free;
    std::vector<std::size_t> observed_occupied;
};

// Integer Bresenham line from `from` to `to`, both endpoints included.
std::vector<Cell> bresenham_line(Cell from, Cell to);

// Precomputed ray fans for one sensor/resolution pair. Every ray starts at the
// center of the pose cell, so the fan is the same for every pose and only the
// cell offsets are stored. Rays aim at a point twice the range away and are
// clipped to the range disk, which keeps their bearing true near the pose.
// Not thread-safe (owns a scratch buffer).
class Raycaster {
public:
    Raycaster(const SensorSpec& spec, double resolution);

    const SensorSpec& spec() const noexcept { return spec_; }
    double resolution() const noexcept { return resolution_; }
    int range_cells() const noexcept { return range_cells_; }

    // Throws InvalidPose when the pose cell is out of bounds or Occupied.
    ScanResult scan(const Pose& pose, const OccupancyGrid& truth);
    ScanResult scan(Cell origin, const OccupancyGrid& truth);

    // Offsets of ray `k`, excluding the origin, clipped to the range disk.
    std::span<const Cell> ray(std::size_t k) const { return rays_[k]; }
    std::size_t ray_count() const noexcept { return rays_.size(); }

private:
    SensorSpec spec_;
    double resolution_;
    int range_cells_;
    std::vector<std::vector<Cell>> rays_;
    std::vector<std::uint32_t> stamp_;
    std::uint32_t epoch_ = 0;
};

ScanResult simulate_scan(const Pose& pose, const SensorSpec& spec, const OccupancyGrid& truth);

// Writes the observed states into `local` and returns the indices that were
// Unknown before. Known cells are never reverted.
std::vector<std::size_t> update_local_map(OccupancyGrid& local, const ScanResult& scan);

// Integer-cell translation of a local map into the merged frame.
struct CellOffset {
    int rows = 0;
    int cols = 0;
};

// Cell-wise join: Unknown is the identity; known cells must agree across
// inputs (ConsistencyError otherwise). The output takes the first map's
// geometry. With offsets, cells shifted outside the output are dropped.
OccupancyGrid merge_maps(std::span<const OccupancyGrid> locals,
                         std::span<const CellOffset> offsets = {});

}  // namespace explore
