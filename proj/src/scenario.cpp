#include "explore/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "explore/connectivity.hpp"
#include "explore/errors.hpp"
#include "explore/map_io.hpp"
#include "explore/random.hpp"

namespace explore {

namespace {

using nlohmann::json;

struct Rect {
    int r0 = 0;
    int c0 = 0;
    int rows = 0;
    int cols = 0;

    int r1() const { return r0 + rows; }
    int c1() const { return c0 + cols; }
    Rect inflated(int k) const { return {r0 - k, c0 - k, rows + 2 * k, cols + 2 * k}; }
    bool intersects(const Rect& o) const {
        return r0 < o.r1() && o.r0 < r1() && c0 < o.c1() && o.c0 < c1();
    }
    bool inside(const Rect& o) const {
        return r0 >= o.r0 && c0 >= o.c0 && r1() <= o.r1() && c1() <= o.c1();
    }
};

constexpr int kWallCells = 2;
constexpr int kDoorCells = 10;
constexpr int kCornerClearance = 6;
constexpr int kSpawnClearance = 3;

class Canvas {
public:
    Canvas(int width, int height, double resolution)
        : grid_(width, height, resolution, CellState::Occupied) {}

    int cells(double meters) const {
        return static_cast<int>(std::lround(meters / grid_.resolution()));
    }
    Rect interior() const { return {1, 1, grid_.height() - 2, grid_.width() - 2}; }

    // Carving never touches the outer ring.
    void carve(const Rect& r) {
        const Rect in = interior();
        grid_.fill_rect(std::max(r.r0, in.r0), std::max(r.c0, in.c0),
                        std::min(r.r1(), in.r1()) - std::max(r.r0, in.r0),
                        std::min(r.c1(), in.c1()) - std::max(r.c0, in.c0), CellState::Free);
    }
    void block(const Rect& r) { grid_.fill_rect(r.r0, r.c0, r.rows, r.cols, CellState::Occupied); }

    OccupancyGrid& grid() { return grid_; }
    OccupancyGrid take() { return std::move(grid_); }

private:
    OccupancyGrid grid_;
};

Canvas make_canvas(const GenSpec& spec) {
    if (spec.extent_x < 5.0 || spec.extent_y < 5.0) {
        throw InfeasibleSpec("extent must be at least 5x5 m");
    }
    if (!(spec.resolution > 0.0)) throw InfeasibleSpec("resolution must be positive");
    return Canvas(static_cast<int>(std::lround(spec.extent_x / spec.resolution)),
                  static_cast<int>(std::lround(spec.extent_y / spec.resolution)),
                  spec.resolution);
}

// ---- corners ---------------------------------------------------------------

enum class Side { South, North, West, East };

struct Obstacle {
    std::array<Rect, 2> parts{};
    int n_parts = 1;
};

// Rejects candidates that would come closer than the clearance to anything
// except the one region wall they are attached to.
bool corner_fits(const Obstacle& cand, std::optional<Side> attached, const Rect& region,
                 std::span<const Obstacle> placed, std::span<const Rect> keep_out) {
    for (int i = 0; i < cand.n_parts; ++i) {
        const Rect& r = cand.parts[i];
        if (!r.inside(region)) return false;
        const Rect grown = r.inflated(kCornerClearance);
        for (const Obstacle& o : placed) {
            for (int j = 0; j < o.n_parts; ++j) {
                if (grown.intersects(o.parts[j])) return false;
            }
        }
        for (const Rect& k : keep_out) {
            if (grown.intersects(k)) return false;
        }
        const bool south_ok = attached == Side::South || grown.r0 >= region.r0;
        const bool north_ok = attached == Side::North || grown.r1() <= region.r1();
        const bool west_ok = attached == Side::West || grown.c0 >= region.c0;
        const bool east_ok = attached == Side::East || grown.c1() <= region.c1();
        if (!(south_ok && north_ok && west_ok && east_ok)) return false;
    }
    return true;
}

Rect attach_to(Side side, const Rect& region, int along, int length, int depth) {
    switch (side) {
        case Side::South: return {region.r0, region.c0 + along, depth, length};
        case Side::North: return {region.r1() - depth, region.c0 + along, depth, length};
        case Side::West: return {region.r0 + along, region.c0, length, depth};
        case Side::East: return {region.r0 + along, region.c1() - depth, length, depth};
    }
    return {};
}

// Scatters wall stubs, wall notches and free-standing L pieces inside `region`
// (a free rectangle bounded by walls). Returns how many were placed.
int scatter_corners(Canvas& canvas, const Rect& region, int count, int min_len, int max_len,
                    Rng& rng, std::span<const Rect> keep_out) {
    std::vector<Obstacle> placed;
    const int attempts = 60 * std::max(count, 1);
    for (int attempt = 0; attempt < attempts && static_cast<int>(placed.size()) < count;
         ++attempt) {
        const int shape = uniform_int(rng, 0, 2);
        const int len_a = uniform_int(rng, min_len, max_len);
        const int len_b = uniform_int(rng, min_len, max_len);
        Obstacle cand;
        std::optional<Side> attached;
        if (shape < 2) {
            const auto side = static_cast<Side>(uniform_int(rng, 0, 3));
            const bool horizontal = side == Side::South || side == Side::North;
            const int side_len = horizontal ? region.cols : region.rows;
            // stub: thin wall sticking out; notch: chunky block.
            const int length = shape == 0 ? kWallCells : std::max(len_a / 2, kWallCells + 2);
            const int depth = shape == 0 ? len_a : std::max(len_b / 2, kWallCells + 2);
            if (side_len - length < 1) continue;
            const int along = uniform_int(rng, 0, side_len - length);
            cand.parts[0] = attach_to(side, region, along, length, depth);
            attached = side;
        } else {
            const int r = uniform_int(rng, region.r0, region.r1() - 1);
            const int c = uniform_int(rng, region.c0, region.c1() - 1);
            const int orient = uniform_int(rng, 0, 3);
            const Rect horiz{r, (orient & 1) ? c - len_a + kWallCells : c, kWallCells, len_a};
            const Rect vert{(orient & 2) ? r - len_b + kWallCells : r, c, len_b, kWallCells};
            cand.parts = {horiz, vert};
            cand.n_parts = 2;
        }
        if (!corner_fits(cand, attached, region, placed, keep_out)) continue;
        for (int i = 0; i < cand.n_parts; ++i) canvas.block(cand.parts[i]);
        placed.push_back(cand);
    }
    return static_cast<int>(placed.size());
}

int default_corner_count(const Rect& region, double resolution) {
    const double area = region.rows * region.cols * resolution * resolution;
    return std::max(1, static_cast<int>(area / 30.0));
}

// ---- element builders --------------------------------------------------------

void build_loop(Canvas& canvas, const GenSpec& spec, Rng& rng) {
    const Rect in = canvas.interior();
    const int lane = canvas.cells(spec.params.loop_lane_width);
    if (lane < kMinPassageCells) throw InfeasibleSpec("loop lane narrower than robot footprint");
    std::array<int, 4> lanes{lane, lane, lane, lane};
    if (spec.params.jitter) {
        const int j = canvas.cells(0.5);
        for (int& l : lanes) l = std::max(kMinPassageCells, l + uniform_int(rng, -j, j));
    }
    const Rect island{in.r0 + lanes[0], in.c0 + lanes[2], in.rows - lanes[0] - lanes[1],
                      in.cols - lanes[2] - lanes[3]};
    if (island.rows < canvas.cells(1.0) || island.cols < canvas.cells(1.0)) {
        throw InfeasibleSpec("loop lanes leave no room for the central island");
    }
    canvas.carve(in);
    canvas.block(island);
}

void build_corridor(Canvas& canvas, const GenSpec& spec, Rng& rng) {
    const Rect in = canvas.interior();
    const int width = canvas.cells(spec.params.corridor_width);
    const int length = canvas.cells(spec.params.corridor_length);
    if (width < kMinPassageCells) {
        throw InfeasibleSpec("corridor width " + std::to_string(spec.params.corridor_width) +
                             " m is below the robot footprint plus two cells");
    }
    if (length < 1) throw InfeasibleSpec("corridor length must be positive");
    const int room = (in.cols - length) / 2;
    if (room < canvas.cells(1.0)) throw InfeasibleSpec("corridor leaves no room for the two spaces");
    if (width > in.rows) throw InfeasibleSpec("corridor wider than the extent");
    const int centered = in.r0 + (in.rows - width) / 2;
    const int r0 = spec.params.jitter
                       ? uniform_int(rng, in.r0 + 1, std::max(in.r0 + 1, in.r1() - width - 1))
                       : centered;
    canvas.carve({in.r0, in.c0, in.rows, room});
    canvas.carve({in.r0, in.c1() - room, in.rows, room});
    canvas.carve({r0, in.c0 + room, width, in.cols - 2 * room});
}

void build_corner(Canvas& canvas, const GenSpec& spec, Rng& rng) {
    const Rect in = canvas.interior();
    canvas.carve(in);
    const int count =
        spec.params.corner_count > 0 ? spec.params.corner_count
                                     : default_corner_count(in, canvas.grid().resolution());
    const int lo = std::max(kWallCells + 2, canvas.cells(spec.params.corner_min));
    const int hi = std::max(lo, canvas.cells(spec.params.corner_max));
    const int placed = scatter_corners(canvas, in, count, lo, hi, rng, {});
    if (placed < count) {
        throw InfeasibleSpec("only " + std::to_string(placed) + " of " + std::to_string(count) +
                             " corners fit the extent");
    }
}

std::vector<int> split_widths(int avail, int k, int min_w, bool jitter, Rng& rng) {
    std::vector<int> widths(k, avail / k);
    widths.back() += avail - (avail / k) * k;
    if (!jitter || k == 1) return widths;
    std::vector<double> weights(k);
    double total = 0.0;
    for (double& w : weights) total += (w = uniform(rng, 0.75, 1.25));
    std::vector<int> jittered(k);
    int used = 0;
    for (int i = 0; i + 1 < k; ++i) {
        jittered[i] = static_cast<int>(avail * weights[i] / total);
        used += jittered[i];
    }
    jittered.back() = avail - used;
    if (std::all_of(jittered.begin(), jittered.end(), [&](int w) { return w >= min_w; })) {
        return jittered;
    }
    return widths;
}

void build_rooms(Canvas& canvas, const GenSpec& spec, Rng& rng) {
    const Rect in = canvas.interior();
    const int hall = canvas.cells(2.0);
    const int min_room = std::max(canvas.cells(spec.params.min_room), kDoorCells + 4);
    const int avail_h = in.rows - hall - 2 * kWallCells;
    if (avail_h < 2 * min_room) throw InfeasibleSpec("extent too short for two rows of rooms");
    const int max_per_row = (in.cols + kWallCells) / (min_room + kWallCells);
    if (max_per_row < 1) throw InfeasibleSpec("extent too narrow for a room");

    int n = spec.params.room_count;
    if (n <= 0) {
        const int hi = std::min(8, 2 * max_per_row);
        const int lo = std::min(4, hi);
        n = uniform_int(rng, lo, hi);
    }
    const int top = (n + 1) / 2;
    const int bottom = n / 2;
    if (top > max_per_row) {
        throw InfeasibleSpec(std::to_string(n) + " rooms cannot fit the extent");
    }

    int bottom_h = avail_h / 2;
    if (spec.params.jitter) {
        const int slack = std::max(0, std::min(bottom_h - min_room, avail_h - bottom_h - min_room));
        bottom_h += uniform_int(rng, -slack / 2, slack / 2);
    }
    const int top_h = avail_h - bottom_h;
    const int hall_r0 = in.r0 + bottom_h + kWallCells;
    canvas.carve({hall_r0, in.c0, hall, in.cols});

    const auto build_row = [&](int count, int r0, int height, int door_r0) {
        if (count == 0) {
            // No rooms on this side: the band joins the hallway as open floor.
            canvas.carve({std::min(r0, door_r0), in.c0, height + kWallCells, in.cols});
            return;
        }
        const int avail_w = in.cols - (count - 1) * kWallCells;
        const auto widths = split_widths(avail_w, count, min_room, spec.params.jitter, rng);
        int c0 = in.c0;
        for (int i = 0; i < count; ++i) {
            const int w = widths[i];
            canvas.carve({r0, c0, height, w});
            const int door = std::min(kDoorCells, w - 4);
            const int door_c0 = spec.params.jitter ? uniform_int(rng, c0 + 2, c0 + w - door - 2)
                                                   : c0 + (w - door) / 2;
            canvas.carve({door_r0, door_c0, kWallCells, door});
            if (i + 1 < count && spec.params.jitter && uniform01(rng) < 0.35) {
                const int side_door = std::min(kDoorCells, height - 4);
                const int dr0 = uniform_int(rng, r0 + 2, r0 + height - side_door - 2);
                canvas.carve({dr0, c0 + w, side_door, kWallCells});
            }
            c0 += w + kWallCells;
        }
    };
    build_row(bottom, in.r0, bottom_h, in.r0 + bottom_h);
    build_row(top, hall_r0 + hall + kWallCells, top_h, hall_r0 + hall);
}

void build_element(Canvas& canvas, const GenSpec& spec, Rng& rng);

// Straight passage across the shared edge of two lattice blocks, joining the
// nearest free cells on both sides.
void connect_blocks(Canvas& canvas, const Rect& a, const Rect& b, bool vertical_edge, Rng& rng) {
    OccupancyGrid& g = canvas.grid();
    const int width = canvas.cells(1.2);
    // Along-edge coordinate range shared by both blocks, away from corners.
    const int lo = vertical_edge ? std::max(a.r0, b.r0) + 2 : std::max(a.c0, b.c0) + 2;
    const int hi = vertical_edge ? std::min(a.r1(), b.r1()) - 2 : std::min(a.c1(), b.c1()) - 2;
    const int edge = vertical_edge ? b.c0 : b.r0;  // first coordinate of b
    const auto free_at = [&](int along, int across) {
        return vertical_edge ? g.at(along, across) == CellState::Free
                             : g.at(across, along) == CellState::Free;
    };
    const int a_min = vertical_edge ? a.c0 : a.r0;
    const int b_max = vertical_edge ? b.c1() : b.r1();
    struct Reach {
        int a_cell = -1;
        int b_cell = -1;
    };
    std::vector<Reach> reach(static_cast<std::size_t>(std::max(hi - lo, 0)));
    for (int t = lo; t < hi; ++t) {
        Reach& rc = reach[t - lo];
        for (int x = edge - 1; x >= a_min; --x) {
            if (free_at(t, x)) { rc.a_cell = x; break; }
        }
        for (int x = edge; x < b_max; ++x) {
            if (free_at(t, x)) { rc.b_cell = x; break; }
        }
    }
    int best_cost = std::numeric_limits<int>::max();
    std::vector<int> best;
    for (int t = lo; t + width <= hi; ++t) {
        int cost = 0;
        for (int k = 0; k < width && cost != std::numeric_limits<int>::max(); ++k) {
            const Reach& rc = reach[t + k - lo];
            if (rc.a_cell < 0 || rc.b_cell < 0) cost = std::numeric_limits<int>::max();
            else cost = std::max(cost, rc.b_cell - rc.a_cell);
        }
        if (cost < best_cost) {
            best_cost = cost;
            best = {t};
        } else if (cost == best_cost && cost != std::numeric_limits<int>::max()) {
            best.push_back(t);
        }
    }
    if (best.empty()) throw InfeasibleSpec("combination blocks cannot be joined");
    const int t0 = best[uniform_int(rng, 0, static_cast<int>(best.size()) - 1)];
    for (int k = 0; k < width; ++k) {
        const Reach& rc = reach[t0 + k - lo];
        if (vertical_edge) canvas.carve({t0 + k, rc.a_cell, 1, rc.b_cell - rc.a_cell + 1});
        else canvas.carve({rc.a_cell, t0 + k, rc.b_cell - rc.a_cell + 1, 1});
    }
}

void build_combination(Canvas& canvas, const GenSpec& spec, Rng& rng) {
    const auto& elements = spec.params.elements;
    if (elements.empty()) throw InfeasibleSpec("combination needs at least one element");
    const int k = static_cast<int>(elements.size());
    const int lattice_cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(k))));
    const int lattice_rows = (k + lattice_cols - 1) / lattice_cols;
    const Rect in = canvas.interior();
    const int block_w = in.cols / lattice_cols;
    const int block_h = in.rows / lattice_rows;
    const double res = canvas.grid().resolution();

    std::vector<Rect> blocks;
    for (int i = 0; i < k; ++i) {
        // Boustrophedon order keeps consecutive elements lattice-adjacent.
        const int lr = i / lattice_cols;
        const int lc_raw = i % lattice_cols;
        const int lc = (lr % 2 == 0) ? lc_raw : lattice_cols - 1 - lc_raw;
        const Rect block{in.r0 + lr * block_h, in.c0 + lc * block_w, block_h, block_w};
        blocks.push_back(block);

        GenSpec sub;
        sub.kind = elements[i];
        if (sub.kind == ScenarioKind::Combination) {
            throw InfeasibleSpec("combination elements cannot nest");
        }
        sub.resolution = res;
        sub.extent_x = block.cols * res;
        sub.extent_y = block.rows * res;
        sub.seed = spec.seed * 1000003ULL + static_cast<std::uint64_t>(i);
        sub.params = spec.params;
        sub.params.elements.clear();
        const double short_side = std::min(sub.extent_x, sub.extent_y);
        sub.params.loop_lane_width = std::min(spec.params.loop_lane_width, 0.3 * short_side);
        sub.params.corridor_length = std::min(spec.params.corridor_length, 0.4 * sub.extent_x);
        sub.params.corner_count = 0;
        sub.params.room_count = 0;

        Canvas piece = make_canvas(sub);
        Rng sub_rng = make_rng(sub.seed, 17);
        build_element(piece, sub, sub_rng);
        const OccupancyGrid& pg = piece.grid();
        // Later elements carve into whatever is already there.
        for (int r = 0; r < pg.height(); ++r) {
            for (int c = 0; c < pg.width(); ++c) {
                if (pg.at(r, c) == CellState::Free) canvas.carve({block.r0 + r, block.c0 + c, 1, 1});
            }
        }
    }
    for (int i = 0; i + 1 < k; ++i) {
        const Rect& a = blocks[i];
        const Rect& b = blocks[i + 1];
        if (a.r0 == b.r0) {
            const bool a_left = a.c0 < b.c0;
            connect_blocks(canvas, a_left ? a : b, a_left ? b : a, true, rng);
        } else {
            const bool a_below = a.r0 < b.r0;
            connect_blocks(canvas, a_below ? a : b, a_below ? b : a, false, rng);
        }
    }
}

void build_element(Canvas& canvas, const GenSpec& spec, Rng& rng) {
    switch (spec.kind) {
        case ScenarioKind::Loop: build_loop(canvas, spec, rng); break;
        case ScenarioKind::Corridor: build_corridor(canvas, spec, rng); break;
        case ScenarioKind::Corner: build_corner(canvas, spec, rng); break;
        case ScenarioKind::Rooms: build_rooms(canvas, spec, rng); break;
        case ScenarioKind::Combination: build_combination(canvas, spec, rng); break;
    }
}

// ---- fixed evaluation layouts ------------------------------------------------

// Five 6x6 m rooms: three along the north side of a 2 m hallway, two along
// the south side next to an open lobby.
OccupancyGrid layout_room() {
    constexpr int kRoom = 60;
    constexpr int kHall = 20;
    const int width = 1 + 3 * kRoom + 2 * kWallCells + 1;
    const int height = 1 + kRoom + kWallCells + kHall + kWallCells + kRoom + 1;
    Canvas canvas(width, height, 0.1);
    const int south_r0 = 1;
    const int hall_r0 = south_r0 + kRoom + kWallCells;
    const int north_r0 = hall_r0 + kHall + kWallCells;
    canvas.carve({hall_r0, 1, kHall, width - 2});
    for (int i = 0; i < 3; ++i) {
        const int c0 = 1 + i * (kRoom + kWallCells);
        canvas.carve({north_r0, c0, kRoom, kRoom});
        canvas.carve({hall_r0 + kHall, c0 + (i == 1 ? 8 : 42), kWallCells, kDoorCells});
        if (i < 2) {
            canvas.carve({south_r0, c0, kRoom, kRoom});
            canvas.carve({south_r0 + kRoom, c0 + (i == 0 ? 25 : 10), kWallCells, kDoorCells});
        }
    }
    // Lobby: shallower than a room and open to the hallway along its length.
    const int lobby_c0 = 1 + 2 * (kRoom + kWallCells);
    canvas.carve({south_r0 + kRoom - 40, lobby_c0, 40 + kWallCells, kRoom});
    return canvas.take();
}

// Square loop with a narrow corridor leaving each side to a dead-end pocket.
OccupancyGrid layout_comb1() {
    constexpr int kSize = 260;
    constexpr int kOuter0 = 65;
    constexpr int kOuterLen = 130;
    constexpr int kLane = 30;
    constexpr int kNarrow = 12;
    constexpr int kNarrowLen = 30;
    Canvas canvas(kSize, kSize, 0.1);
    canvas.carve({kOuter0, kOuter0, kOuterLen, kOuterLen});
    canvas.block({kOuter0 + kLane, kOuter0 + kLane, kOuterLen - 2 * kLane, kOuterLen - 2 * kLane});
    const int mid = kOuter0 + kOuterLen / 2 - kNarrow / 2;
    const int outer1 = kOuter0 + kOuterLen;
    const int pocket_w = 60;
    const int pocket_c0 = kOuter0 + kOuterLen / 2 - pocket_w / 2;
    const int pocket_depth = kOuter0 - kNarrowLen - 1;
    // north / south
    canvas.carve({outer1, mid, kNarrowLen, kNarrow});
    canvas.carve({outer1 + kNarrowLen, pocket_c0, pocket_depth, pocket_w});
    canvas.carve({kOuter0 - kNarrowLen, mid, kNarrowLen, kNarrow});
    canvas.carve({1, pocket_c0, pocket_depth, pocket_w});
    // east / west
    canvas.carve({mid, outer1, kNarrow, kNarrowLen});
    canvas.carve({pocket_c0, outer1 + kNarrowLen, pocket_w, pocket_depth});
    canvas.carve({mid, kOuter0 - kNarrowLen, kNarrow, kNarrowLen});
    canvas.carve({pocket_c0, 1, pocket_w, pocket_depth});
    return canvas.take();
}

// Four rooms around a cross-shaped hallway, each cluttered with corners.
OccupancyGrid layout_comb2() {
    constexpr int kSize = 200;
    constexpr int kHall = 20;
    constexpr int kRoom = 87;
    Canvas canvas(kSize, kSize, 0.1);
    const int hall0 = 1 + kRoom + kWallCells;  // 90
    canvas.carve({hall0, 1, kHall, kSize - 2});
    canvas.carve({1, hall0, kSize - 2, kHall});
    const int far0 = hall0 + kHall + kWallCells;  // 112
    const std::array<Rect, 4> rooms{{{1, 1, kRoom, kRoom},
                                     {1, far0, kRoom, kRoom},
                                     {far0, 1, kRoom, kRoom},
                                     {far0, far0, kRoom, kRoom}}};
    // Doors: SW/SE open north onto the hallway, NW/NE open east/west.
    const std::array<Rect, 4> doors{{{1 + kRoom, 50, kWallCells, kDoorCells},
                                     {1 + kRoom, far0 + 20, kWallCells, kDoorCells},
                                     {far0 + 30, 1 + kRoom, kDoorCells, kWallCells},
                                     {far0 + 55, far0 - kWallCells, kDoorCells, kWallCells}}};
    Rng rng = make_rng(20230512, 2);
    for (int i = 0; i < 4; ++i) {
        canvas.carve(rooms[i]);
        canvas.carve(doors[i]);
        const Rect keep[] = {doors[i].inflated(4)};
        scatter_corners(canvas, rooms[i], 5, 10, 30, rng, keep);
    }
    return canvas.take();
}

Scenario finish(OccupancyGrid grid, std::string name, const GenSpec& spec) {
    Scenario s;
    s.ground_truth = std::move(grid);
    s.name = std::move(name);
    s.gen = spec;
    s.spawns = place_spawns(s.ground_truth, 2, SpawnMode::Far, spec.seed);
    validate(s);
    return s;
}

Scenario renamed(Scenario s, std::string name) {
    s.name = std::move(name);
    return s;
}

json params_to_json(const GenParams& p) {
    json elems = json::array();
    for (ScenarioKind k : p.elements) elems.push_back(std::string(to_string(k)));
    return {{"loop_lane_width", p.loop_lane_width}, {"corridor_width", p.corridor_width},
            {"corridor_length", p.corridor_length}, {"corner_count", p.corner_count},
            {"corner_min", p.corner_min},           {"corner_max", p.corner_max},
            {"room_count", p.room_count},           {"min_room", p.min_room},
            {"elements", elems},                    {"jitter", p.jitter}};
}

GenParams params_from_json(const json& j) {
    GenParams p;
    p.loop_lane_width = j.value("loop_lane_width", p.loop_lane_width);
    p.corridor_width = j.value("corridor_width", p.corridor_width);
    p.corridor_length = j.value("corridor_length", p.corridor_length);
    p.corner_count = j.value("corner_count", p.corner_count);
    p.corner_min = j.value("corner_min", p.corner_min);
    p.corner_max = j.value("corner_max", p.corner_max);
    p.room_count = j.value("room_count", p.room_count);
    p.min_room = j.value("min_room", p.min_room);
    p.jitter = j.value("jitter", p.jitter);
    if (j.contains("elements")) {
        for (const auto& e : j.at("elements")) {
            p.elements.push_back(parse_scenario_kind(e.get<std::string>()));
        }
    }
    return p;
}

}  // namespace

std::string_view to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::Loop: return "loop";
        case ScenarioKind::Corridor: return "corridor";
        case ScenarioKind::Corner: return "corner";
        case ScenarioKind::Rooms: return "rooms";
        case ScenarioKind::Combination: return "combination";
    }
    return "?";
}

ScenarioKind parse_scenario_kind(std::string_view name) {
    if (name == "loop") return ScenarioKind::Loop;
    if (name == "corridor") return ScenarioKind::Corridor;
    if (name == "corner") return ScenarioKind::Corner;
    if (name == "rooms" || name == "room") return ScenarioKind::Rooms;
    if (name == "combination" || name == "comb") return ScenarioKind::Combination;
    throw UnknownName("scenario kind '" + std::string(name) + "'");
}

std::string_view to_string(SpawnMode m) {
    switch (m) {
        case SpawnMode::Far: return "far";
        case SpawnMode::Close: return "close";
        case SpawnMode::Explicit: return "explicit";
    }
    return "?";
}

SpawnMode parse_spawn_mode(std::string_view name) {
    if (name == "far") return SpawnMode::Far;
    if (name == "close") return SpawnMode::Close;
    if (name == "explicit") return SpawnMode::Explicit;
    throw UnknownName("spawn mode '" + std::string(name) + "'");
}

Scenario generate(const GenSpec& spec) {
    Canvas canvas = make_canvas(spec);
    Rng rng = make_rng(spec.seed, static_cast<std::uint64_t>(spec.kind) + 1);
    build_element(canvas, spec, rng);
    return finish(canvas.take(), std::string(to_string(spec.kind)) + "-" + std::to_string(spec.seed),
                  spec);
}

std::vector<Scenario> batch_generate(const GenSpec& spec_template, int n,
                                     std::uint64_t base_seed) {
    if (n < 1) throw InvalidInput("batch size must be at least 1");
    std::vector<Scenario> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        GenSpec spec = spec_template;
        spec.seed = base_seed + static_cast<std::uint64_t>(i);
        try {
            out.push_back(generate(spec));
        } catch (const InfeasibleSpec& e) {
            throw InfeasibleSpec("batch index " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

Scenario builtin(std::string_view name) {
    GenSpec spec;
    spec.params.jitter = false;
    if (name == "loop") {
        spec.kind = ScenarioKind::Loop;
        spec.params.loop_lane_width = 4.0;
        return renamed(generate(spec), "loop");
    }
    if (name == "corridor") {
        // Two 7x20 m spaces (plus outer walls) joined by a 6 m corridor.
        spec.kind = ScenarioKind::Corridor;
        spec.extent_x = 20.2;
        spec.extent_y = 20.2;
        return renamed(generate(spec), "corridor");
    }
    if (name == "corner") {
        spec.kind = ScenarioKind::Corner;
        spec.seed = 11;
        spec.params.jitter = true;
        spec.params.corner_count = 14;
        return renamed(generate(spec), "corner");
    }
    if (name == "room") {
        spec.kind = ScenarioKind::Rooms;
        spec.params.room_count = 5;
        spec.params.min_room = 6.0;
        OccupancyGrid g = layout_room();
        spec.extent_x = g.width() * g.resolution();
        spec.extent_y = g.height() * g.resolution();
        return finish(std::move(g), "room", spec);
    }
    if (name == "comb1") {
        spec.kind = ScenarioKind::Combination;
        spec.params.elements = {ScenarioKind::Loop, ScenarioKind::Corridor, ScenarioKind::Corridor,
                                ScenarioKind::Corridor, ScenarioKind::Corridor};
        spec.extent_x = spec.extent_y = 26.0;
        return finish(layout_comb1(), "comb1", spec);
    }
    if (name == "comb2") {
        spec.kind = ScenarioKind::Combination;
        spec.params.elements = {ScenarioKind::Rooms, ScenarioKind::Corner};
        return finish(layout_comb2(), "comb2", spec);
    }
    throw UnknownName("builtin scenario '" + std::string(name) + "'");
}

void validate(const Scenario& s) {
    const OccupancyGrid& g = s.ground_truth;
    if (g.size() == 0) throw InfeasibleSpec("empty ground truth");
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] == CellState::Unknown) throw InfeasibleSpec("ground truth contains Unknown cells");
    }
    for (int c = 0; c < g.width(); ++c) {
        if (g.at(0, c) != CellState::Occupied || g.at(g.height() - 1, c) != CellState::Occupied) {
            throw InfeasibleSpec("boundary ring is not fully occupied");
        }
    }
    for (int r = 0; r < g.height(); ++r) {
        if (g.at(r, 0) != CellState::Occupied || g.at(r, g.width() - 1) != CellState::Occupied) {
            throw InfeasibleSpec("boundary ring is not fully occupied");
        }
    }
    std::vector<int> labels;
    const int components = label_components(g, kFreeOnly, labels);
    if (components == 0) throw InfeasibleSpec("no free space");
    if (components > 1) {
        throw InfeasibleSpec("free space splits into " + std::to_string(components) +
                             " components");
    }
    for (const Pose& p : s.spawns) {
        Cell c;
        try {
            c = world_to_cell(p, g);
        } catch (const OutOfBounds&) {
            throw InfeasibleSpec("spawn outside the grid");
        }
        if (g.at(c) != CellState::Free) throw InfeasibleSpec("spawn on a non-free cell");
    }
}

std::vector<Pose> place_spawns(const OccupancyGrid& truth, int n, SpawnMode mode,
                               std::uint64_t seed) {
    if (n < 1) throw InvalidInput("need at least one spawn");
    if (mode == SpawnMode::Explicit) throw InvalidInput("explicit spawns are not generated");
    Rng rng = make_rng(seed, 0x5BA7);
    const std::vector<int> clearance = obstacle_clearance(truth, kSpawnClearance + 1);
    std::vector<std::size_t> candidates;
    for (int min_clear : {kSpawnClearance, 1}) {
        for (std::size_t i = 0; i < truth.size(); ++i) {
            if (truth[i] == CellState::Free && clearance[i] >= min_clear) candidates.push_back(i);
        }
        if (!candidates.empty()) break;
    }
    if (candidates.empty()) throw InfeasibleSpec("no free cell to spawn on");

    std::vector<Cell> placed;
    placed.push_back(truth.cell_of(
        candidates[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(candidates.size()) - 1))]));
    std::vector<int> min_dist = bfs_distances(truth, placed.front());

    while (static_cast<int>(placed.size()) < n) {
        std::optional<std::size_t> pick;
        if (mode == SpawnMode::Far) {
            int best = -1;
            for (std::size_t idx : candidates) {
                if (min_dist[idx] > best) {
                    best = min_dist[idx];
                    pick = idx;
                }
            }
            if (best <= 0) pick.reset();
        } else {
            const Cell first = placed.front();
            std::vector<std::size_t> near;
            for (bool relaxed : {false, true}) {
                for (std::size_t i = 0; i < truth.size(); ++i) {
                    if (truth[i] != CellState::Free || min_dist[i] <= 0) continue;
                    if (!relaxed && clearance[i] < kSpawnClearance) continue;
                    const Cell c = truth.cell_of(i);
                    const double d = std::hypot(c.row - first.row, c.col - first.col) *
                                     truth.resolution();
                    if (d > 1.0 + 1e-9) continue;
                    const bool spaced = std::all_of(placed.begin(), placed.end(), [&](Cell p) {
                        return std::hypot(c.row - p.row, c.col - p.col) * truth.resolution() >=
                               0.5 - 1e-9;
                    });
                    if (spaced || relaxed) near.push_back(i);
                }
                if (!near.empty()) break;
            }
            if (!near.empty()) {
                pick = near[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(near.size()) - 1))];
            }
        }
        if (!pick) throw InfeasibleSpec("cannot place " + std::to_string(n) + " distinct spawns");
        const Cell c = truth.cell_of(*pick);
        placed.push_back(c);
        const std::vector<int> d = bfs_distances(truth, c);
        for (std::size_t i = 0; i < min_dist.size(); ++i) {
            if (d[i] != kUnreachable && (min_dist[i] == kUnreachable || d[i] < min_dist[i])) {
                min_dist[i] = d[i];
            }
        }
    }
    std::vector<Pose> poses;
    for (const Cell& c : placed) poses.push_back(cell_to_world(c, truth));
    return poses;
}

std::string scenario_sidecar_json(const Scenario& s, std::string_view map_file) {
    json spawns = json::array();
    for (const Pose& p : s.spawns) spawns.push_back({p.x, p.y, p.theta});
    const json j = {{"name", s.name},
                    {"map", std::string(map_file)},
                    {"spawns", spawns},
                    {"gen_params",
                     {{"kind", std::string(to_string(s.gen.kind))},
                      {"seed", s.gen.seed},
                      {"extent", {s.gen.extent_x, s.gen.extent_y}},
                      {"resolution", s.gen.resolution},
                      {"params", params_to_json(s.gen.params)}}}};
    return j.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::filesystem::path& stem) {
    auto base = stem;
    base.replace_extension();
    save_map(s.ground_truth, base);
    auto yaml_name = base.filename();
    yaml_name += ".yaml";
    auto json_path = base;
    json_path += ".json";
    write_file(json_path, scenario_sidecar_json(s, yaml_name.string()));
}

Scenario load_scenario(const std::filesystem::path& path) {
    auto json_path = path;
    json_path.replace_extension(".json");
    Scenario s;
    json j;
    try {
        j = json::parse(read_file(json_path));
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario sidecar: ") + e.what());
    }
    try {
        std::filesystem::path map = j.value("map", std::string());
        if (map.empty()) map = json_path;
        if (map.is_relative()) map = json_path.parent_path() / map;
        s.ground_truth = load_map(map);
        s.name = j.value("name", json_path.stem().string());
        for (const auto& p : j.at("spawns")) {
            s.spawns.push_back({p.at(0).get<double>(), p.at(1).get<double>(),
                                p.size() > 2 ? p.at(2).get<double>() : 0.0});
        }
        if (j.contains("gen_params")) {
            const json& g = j.at("gen_params");
            s.gen.kind = parse_scenario_kind(g.value("kind", std::string("loop")));
            s.gen.seed = g.value("seed", std::uint64_t{0});
            if (g.contains("extent")) {
                s.gen.extent_x = g.at("extent").at(0).get<double>();
                s.gen.extent_y = g.at("extent").at(1).get<double>();
            }
            s.gen.resolution = g.value("resolution", kDefaultResolution);
            if (g.contains("params")) s.gen.params = params_from_json(g.at("params"));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario sidecar: ") + e.what());
    }
    validate(s);
    return s;
}

}  // namespace explore
