#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "explore/engine.hpp"

namespace explore {

struct ExperimentEntry {
    std::string scenario;
    StrategyKind strategy = StrategyKind::Cost;
    std::size_t robots = 1;
    SpawnMode spawn = SpawnMode::Far;
    std::vector<std::uint64_t> seeds{0};
};

enum class ReportFormat { Csv, Markdown, Both };

struct ExperimentSpec {
    std::vector<ExperimentEntry> entries;
    std::string out_dir = "bench_out";
    ReportFormat format = ReportFormat::Both;
    std::size_t workers = 1;
    std::optional<double> timeout;
};

// {"experiments": [{"scenarios": ["room", "loop"], "strategies": ["cost", "field"],
//                   "robots": [1, 2], "spawn": ["far", "close"], "seeds": [0, 1, 2]}],
//  "out": "dir", "format": "csv" | "markdown" | "both", "workers": 4, "timeout": 3000}
// Each experiment expands to the cartesian product of its lists; singular keys
// ("scenario", "strategy") and scalars are accepted too. Throws InvalidConfig
// or UnknownName.
ExperimentSpec parse_experiment_spec(std::string_view json_text);

struct BenchRun {
    std::string scenario;
    StrategyKind strategy = StrategyKind::Cost;
    std::size_t robots = 1;
    SpawnMode spawn = SpawnMode::Far;
    std::uint64_t seed = 0;
    std::optional<RunMetrics> metrics;  // empty when the run failed
    std::string error;
};

std::vector<BenchRun> run_experiment(const ExperimentSpec& spec);

struct ReportTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Rows: scenario x spawn mode (x robot count when mixed). Columns: strategy x
// {T_topo, T_total}, plus sigma and r_o when any run has several robots. Cells
// hold the mean over seeds; "n/a" when any contributing run failed or lacks the
// value.
ReportTable build_report(std::span<const BenchRun> runs);

std::string report_csv(const ReportTable& t);
std::string report_markdown(const ReportTable& t);

}  // namespace explore
