#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "explore/grid.hpp"

namespace explore {

enum class ScenarioKind { Loop, Corridor, Corner, Rooms, Combination };

std::string_view to_string(ScenarioKind k);
ScenarioKind parse_scenario_kind(std::string_view name);  // throws UnknownName

// Kind-specific generation knobs. Lengths in meters.
struct GenParams {
    double loop_lane_width = 4.0;
    double corridor_width = 1.5;
    double corridor_length = 6.0;
    int corner_count = 0;  // 0: one per ~30 m^2 of floor
    double corner_min = 1.0;
    double corner_max = 3.0;
    int room_count = 0;  // 0: seeded pick among the counts that fit
    double min_room = 3.0;
    std::vector<ScenarioKind> elements;  // Combination only
    bool jitter = true;                  // seeded perturbation of the nominal layout

    bool operator==(const GenParams&) const = default;
};

struct GenSpec {
    ScenarioKind kind = ScenarioKind::Loop;
    double extent_x = 20.0;  // m, including the outer wall
    double extent_y = 20.0;
    std::uint64_t seed = 0;
    double resolution = kDefaultResolution;
    GenParams params{};

    bool operator==(const GenSpec&) const = default;
};

struct Scenario {
    OccupancyGrid ground_truth;
    std::vector<Pose> spawns;
    std::string name;
    GenSpec gen{};
};

enum class SpawnMode { Far, Close, Explicit };

std::string_view to_string(SpawnMode m);
SpawnMode parse_spawn_mode(std::string_view name);

// Robot footprint is one cell; corridors need two more.
inline constexpr int kMinPassageCells = 3;

Scenario generate(const GenSpec& spec);
std::vector<Scenario> batch_generate(const GenSpec& spec_template, int n, std::uint64_t base_seed);

inline constexpr std::string_view kBuiltinNames[] = {"loop", "corridor", "corner",
                                                     "room", "comb1",    "comb2"};
Scenario builtin(std::string_view name);

// Throws InfeasibleSpec naming the first violated scenario invariant.
void validate(const Scenario& s);

// Spawn placement on a ground-truth grid. `Far` spreads robots by BFS
// distance; `Close` keeps every robot within 1 m of the first. The first spawn
// is a seeded pick among cells with some clearance from walls.
std::vector<Pose> place_spawns(const OccupancyGrid& truth, int n, SpawnMode mode,
                               std::uint64_t seed);

// <stem>.pgm + <stem>.yaml + <stem>.json
void save_scenario(const Scenario& s, const std::filesystem::path& stem);
Scenario load_scenario(const std::filesystem::path& path);

std::string scenario_sidecar_json(const Scenario& s, std::string_view map_file);

}  // namespace explore
