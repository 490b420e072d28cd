#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "explore/events.hpp"

namespace explore {

struct CoverageSample {
    double time = 0.0;   // s
    double ratio = 0.0;  // known observable cells / observable cells
};

struct CoverageCurve {
    std::vector<CoverageSample> samples;  // strictly increasing time
};

// Earliest sample time with ratio >= r. Throws InvalidRatio unless 0 < r <= 1.
std::optional<double> time_at_ratio(const CoverageCurve& curve, double r);

// Population standard deviation. Throws EmptyInput / ValueError (negative area).
double sigma(std::span<const double> areas);

// (sum |K_i| - |union K_i|) / total_cells. Sets hold linear cell indices
// without duplicates. Throws InvalidInput for fewer than two sets or
// total_cells == 0.
double overlap_ratio(std::span<const std::vector<std::size_t>> known, std::size_t total_cells);

struct Attribution {
    std::vector<std::vector<std::size_t>> known;  // per robot, sorted
    std::vector<double> areas;                    // m^2
};

// Rebuilds per-robot observed-cell sets from Observation events. With a mask,
// only cells whose mask entry is non-zero count; free_only drops Occupied
// observations. Throws MalformedLog on out-of-range robots/cells or decreasing
// timestamps.
Attribution attribute_coverage(const EventLog& log, std::size_t n_robots,
                               std::span<const std::uint8_t> mask = {}, bool free_only = false);

struct RunMetrics {
    std::optional<double> t_topo;   // s
    std::optional<double> t_total;  // s
    std::vector<double> areas;      // S_i, m^2
    double sigma = 0.0;             // m^2
    std::optional<double> overlap;  // r_o, multi-robot only
    double s_total = 0.0;           // m^2, observable terrain
    double final_ratio = 0.0;
    double sim_time = 0.0;  // s
    Termination termination = Termination::Timeout;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    std::size_t n_robots = 0;
    std::string scenario;
    std::string strategy;
    std::string spawn_mode;

    bool operator==(const RunMetrics&) const = default;
};

std::string metrics_to_json(const RunMetrics& m);
RunMetrics metrics_from_json(const std::string& text);

std::string metrics_csv_header();
std::string metrics_csv_row(const RunMetrics& m);

std::string coverage_to_csv(const CoverageCurve& curve);

}  // namespace explore
