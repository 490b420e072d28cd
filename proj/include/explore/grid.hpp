#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace explore {

inline constexpr double kDefaultResolution = 0.1;  // m/cell

enum class CellState : std::uint8_t { Free = 0, Occupied = 1, Unknown = 2 };

// Grid cell index. Rows grow with +y, columns with +x.
struct Cell {
    int row = 0;
    int col = 0;

    auto operator<=>(const Cell&) const = default;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2&) const = default;
};

struct Pose {
    double x = 0.0;      // m
    double y = 0.0;      // m
    double theta = 0.0;  // rad

    bool operator==(const Pose&) const = default;
};

// Row-major ternary cell matrix with a metric frame. Used for ground truth,
// per-robot local maps and the merged map alike.
class OccupancyGrid {
public:
    OccupancyGrid() = default;
    OccupancyGrid(int width, int height, double resolution = kDefaultResolution,
                  CellState fill = CellState::Unknown, Point2 origin = {});

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    double resolution() const noexcept { return resolution_; }
    Point2 origin() const noexcept { return origin_; }
    std::size_t size() const noexcept { return cells_.size(); }

    bool in_bounds(int row, int col) const noexcept {
        return row >= 0 && col >= 0 && row < height_ && col < width_;
    }
    bool in_bounds(Cell c) const noexcept { return in_bounds(c.row, c.col); }

    std::size_t index(Cell c) const noexcept {
        return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(c.col);
    }
    Cell cell_of(std::size_t idx) const noexcept {
        return {static_cast<int>(idx / static_cast<std::size_t>(width_)),
                static_cast<int>(idx % static_cast<std::size_t>(width_))};
    }

    CellState at(Cell c) const noexcept { return cells_[index(c)]; }
    CellState& at(Cell c) noexcept { return cells_[index(c)]; }
    CellState at(int row, int col) const noexcept { return at(Cell{row, col}); }
    CellState& at(int row, int col) noexcept { return at(Cell{row, col}); }
    CellState operator[](std::size_t idx) const noexcept { return cells_[idx]; }
    CellState& operator[](std::size_t idx) noexcept { return cells_[idx]; }

    std::span<const CellState> cells() const noexcept { return cells_; }
    std::span<CellState> cells() noexcept { return cells_; }

    // Clipped to the grid.
    void fill_rect(int row0, int col0, int rows, int cols, CellState s);

    bool same_geometry(const OccupancyGrid& other) const noexcept;

    bool operator==(const OccupancyGrid&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    double resolution_ = kDefaultResolution;
    Point2 origin_{};
    std::vector<CellState> cells_;
};

// Throws OutOfBounds when p lies outside the grid extent.
Cell world_to_cell(const Pose& p, const OccupancyGrid& g);
// Center of the cell.
Pose cell_to_world(Cell c, const OccupancyGrid& g);

std::size_t count_state(const OccupancyGrid& g, CellState s);
double area_of(const OccupancyGrid& g, CellState s);

// '.' Free, '#' Occupied, '?' Unknown; the first line is row 0.
OccupancyGrid grid_from_ascii(std::span<const std::string_view> rows,
                              double resolution = kDefaultResolution);
std::string grid_to_ascii(const OccupancyGrid& g);

char state_char(CellState s) noexcept;

}  // namespace explore
