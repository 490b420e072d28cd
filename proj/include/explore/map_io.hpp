#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "explore/grid.hpp"

namespace explore {

// YAML sidecar of a map_server style PGM map.
struct MapMetadata {
    std::string image;
    double resolution = kDefaultResolution;
    Point2 origin{};
    double origin_yaw = 0.0;
    double occupied_thresh = 0.65;
    double free_thresh = 0.196;
    bool negate = false;
};

// Pixel values written by save_map.
inline constexpr unsigned char kPixelFree = 254;
inline constexpr unsigned char kPixelOccupied = 0;
inline constexpr unsigned char kPixelUnknown = 205;

// Decodes a binary (P5) PGM. Image row 0 is the top of the map, i.e. grid row
// height-1.
OccupancyGrid decode_pgm(std::string_view bytes, const MapMetadata& meta);
std::string encode_pgm(const OccupancyGrid& g);

MapMetadata parse_map_yaml(std::string_view text);
std::string emit_map_yaml(const MapMetadata& meta);

// `path` may name either the .yaml sidecar or the .pgm image; the other file is
// found next to it.
OccupancyGrid load_map(const std::filesystem::path& path);
// Writes <stem>.pgm and <stem>.yaml; `path` may carry either extension or none.
void save_map(const OccupancyGrid& g, const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace explore
