#include "explore/map_io.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "explore/errors.hpp"

namespace explore {

namespace {

class PgmHeaderReader {
public:
    explicit PgmHeaderReader(std::string_view bytes) : bytes_(bytes) {}

    std::string_view magic() {
        if (bytes_.size() < 2) throw ParseError("truncated PGM header");
        pos_ = 2;
        return bytes_.substr(0, 2);
    }

    int next_int() {
        skip_space_and_comments();
        const std::size_t begin = pos_;
        while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
            ++pos_;
        }
        if (begin == pos_ || pos_ - begin > 9) throw ParseError("malformed PGM header field");
        return std::stoi(std::string(bytes_.substr(begin, pos_ - begin)));
    }

    // Exactly one whitespace byte separates the header from the raster.
    std::size_t raster_offset() {
        if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
            throw ParseError("missing whitespace before PGM raster");
        }
        return pos_ + 1;
    }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const char ch = bytes_[pos_];
            if (std::isspace(static_cast<unsigned char>(ch))) {
                ++pos_;
            } else if (ch == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

CellState classify(unsigned value, unsigned maxval, const MapMetadata& meta) {
    const double v = static_cast<double>(value) / static_cast<double>(maxval);
    const double occ = meta.negate ? v : 1.0 - v;
    if (occ > meta.occupied_thresh) return CellState::Occupied;
    if (occ < meta.free_thresh) return CellState::Free;
    return CellState::Unknown;
}

std::filesystem::path with_ext(std::filesystem::path p, const char* ext) {
    return p.replace_extension(ext);
}

}  // namespace

OccupancyGrid decode_pgm(std::string_view bytes, const MapMetadata& meta) {
    if (!(meta.free_thresh >= 0.0 && meta.free_thresh < meta.occupied_thresh &&
          meta.occupied_thresh <= 1.0)) {
        throw ValueError("thresholds must satisfy 0 <= free_thresh < occupied_thresh <= 1");
    }
    PgmHeaderReader reader(bytes);
    const std::string_view magic = reader.magic();
    if (magic != "P5") {
        throw ParseError("unsupported PGM magic '" + std::string(magic) + "' (expected P5)");
    }
    const int width = reader.next_int();
    const int height = reader.next_int();
    const int maxval = reader.next_int();
    if (width <= 0 || height <= 0) throw ParseError("non-positive PGM dimensions");
    if (maxval <= 0 || maxval > 255) throw ParseError("only 8-bit PGM rasters are supported");
    const std::size_t offset = reader.raster_offset();
    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bytes.size() < offset + n) throw ParseError("truncated PGM raster");

    OccupancyGrid g(width, height, meta.resolution, CellState::Unknown, meta.origin);
    for (int img_row = 0; img_row < height; ++img_row) {
        const int row = height - 1 - img_row;
        for (int col = 0; col < width; ++col) {
            const auto value = static_cast<unsigned char>(
                bytes[offset + static_cast<std::size_t>(img_row) * width + col]);
            if (value > maxval) {
                throw ValueError("pixel value " + std::to_string(value) + " exceeds maxval");
            }
            g.at(row, col) = classify(value, static_cast<unsigned>(maxval), meta);
        }
    }
    return g;
}

std::string encode_pgm(const OccupancyGrid& g) {
    std::string out = "P5\n# explore map " + std::to_string(g.resolution()) + " m/pixel\n" +
                      std::to_string(g.width()) + " " + std::to_string(g.height()) + "\n255\n";
    out.reserve(out.size() + g.size());
    for (int img_row = 0; img_row < g.height(); ++img_row) {
        const int row = g.height() - 1 - img_row;
        for (int col = 0; col < g.width(); ++col) {
            switch (g.at(row, col)) {
                case CellState::Free: out.push_back(static_cast<char>(kPixelFree)); break;
                case CellState::Occupied: out.push_back(static_cast<char>(kPixelOccupied)); break;
                case CellState::Unknown: out.push_back(static_cast<char>(kPixelUnknown)); break;
            }
        }
    }
    return out;
}

MapMetadata parse_map_yaml(std::string_view text) {
    MapMetadata meta;
    try {
        const YAML::Node node = YAML::Load(std::string(text));
        if (!node.IsMap()) throw ParseError("map YAML is not a mapping");
        if (node["image"]) meta.image = node["image"].as<std::string>();
        if (!node["resolution"]) throw ParseError("map YAML lacks 'resolution'");
        meta.resolution = node["resolution"].as<double>();
        if (node["origin"]) {
            const auto origin = node["origin"].as<std::vector<double>>();
            if (origin.size() < 2) throw ParseError("'origin' needs [x, y, yaw]");
            meta.origin = {origin[0], origin[1]};
            meta.origin_yaw = origin.size() > 2 ? origin[2] : 0.0;
        }
        if (node["occupied_thresh"]) meta.occupied_thresh = node["occupied_thresh"].as<double>();
        if (node["free_thresh"]) meta.free_thresh = node["free_thresh"].as<double>();
        if (node["negate"]) meta.negate = node["negate"].as<int>() != 0;
    } catch (const YAML::Exception& e) {
        throw ParseError(std::string("map YAML: ") + e.what());
    }
    if (!(meta.resolution > 0.0)) throw ValueError("resolution must be positive");
    return meta;
}

std::string emit_map_yaml(const MapMetadata& meta) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "image" << YAML::Value << meta.image;
    out << YAML::Key << "resolution" << YAML::Value << meta.resolution;
    out << YAML::Key << "origin" << YAML::Value << YAML::Flow << YAML::BeginSeq
        << meta.origin.x << meta.origin.y << meta.origin_yaw << YAML::EndSeq;
    out << YAML::Key << "negate" << YAML::Value << (meta.negate ? 1 : 0);
    out << YAML::Key << "occupied_thresh" << YAML::Value << meta.occupied_thresh;
    out << YAML::Key << "free_thresh" << YAML::Value << meta.free_thresh;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("writing '" + path.string() + "' failed");
}

OccupancyGrid load_map(const std::filesystem::path& path) {
    const auto yaml_path = with_ext(path, ".yaml");
    MapMetadata meta = parse_map_yaml(read_file(yaml_path));
    std::filesystem::path image = meta.image.empty() ? with_ext(path, ".pgm")
                                                     : std::filesystem::path(meta.image);
    if (image.is_relative()) image = yaml_path.parent_path() / image;
    return decode_pgm(read_file(image), meta);
}

void save_map(const OccupancyGrid& g, const std::filesystem::path& path) {
    const auto pgm_path = with_ext(path, ".pgm");
    MapMetadata meta;
    meta.image = pgm_path.filename().string();
    meta.resolution = g.resolution();
    meta.origin = g.origin();
    write_file(pgm_path, encode_pgm(g));
    write_file(with_ext(path, ".yaml"), emit_map_yaml(meta));
}

}  // namespace explore
