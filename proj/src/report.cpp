#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <string>

#include "explore/bench.hpp"
#include "explore/errors.hpp"
#include "explore/protocol.hpp"
#include "json.hpp"

namespace explore {

using nlohmann::json;

namespace {

constexpr const char* kMissing = "n/a";

// Accepts either a scalar or an array under `plural`, or a scalar under `singular`.
std::vector<json> list_of(const json& j, const char* plural, const char* singular) {
    const json* v = nullptr;
    if (j.contains(plural)) {
        v = &j.at(plural);
    } else if (j.contains(singular)) {
        v = &j.at(singular);
    }
    if (!v) return {};
    if (v->is_array()) return {v->begin(), v->end()};
    return {*v};
}

std::string fmt(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

ExperimentSpec parse_experiment_spec(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidConfig(std::string("experiment spec is not valid JSON: ") + e.what());
    }
    ExperimentSpec spec;
    try {
        spec.out_dir = j.value("out", spec.out_dir);
        const std::string format = j.value("format", std::string("both"));
        if (format == "csv") {
            spec.format = ReportFormat::Csv;
        } else if (format == "markdown" || format == "md") {
            spec.format = ReportFormat::Markdown;
        } else if (format == "both") {
            spec.format = ReportFormat::Both;
        } else {
            throw InvalidConfig("unknown report format '" + format + "'");
        }
        spec.workers = j.value("workers", std::size_t{1});
        if (j.contains("timeout")) spec.timeout = j.at("timeout").get<double>();
        if (!j.contains("experiments") || !j.at("experiments").is_array()) {
            throw InvalidConfig("spec needs an 'experiments' array");
        }
        for (const json& e : j.at("experiments")) {
            auto scenarios = list_of(e, "scenarios", "scenario");
            auto strategies = list_of(e, "strategies", "strategy");
            auto robots = list_of(e, "robots", "n_robots");
            auto spawns = list_of(e, "spawn", "spawn_mode");
            auto seeds = list_of(e, "seeds", "seed");
            if (scenarios.empty()) throw InvalidConfig("experiment without scenarios");
            if (strategies.empty()) throw InvalidConfig("experiment without strategies");
            if (robots.empty()) robots.emplace_back(1);
            if (spawns.empty()) spawns.emplace_back("far");
            if (seeds.empty()) seeds.emplace_back(0);
            std::vector<std::uint64_t> seed_list;
            for (const json& s : seeds) seed_list.push_back(s.get<std::uint64_t>());
            for (const json& sc : scenarios) {
                const std::string name = sc.get<std::string>();
                resolve_scenario(name);
                for (const json& st : strategies) {
                    for (const json& n : robots) {
                        for (const json& sp : spawns) {
                            ExperimentEntry entry;
                            entry.scenario = name;
                            entry.strategy = parse_strategy(st.get<std::string>());
                            entry.robots = n.get<std::size_t>();
                            entry.spawn = parse_spawn_mode(sp.get<std::string>());
                            entry.seeds = seed_list;
                            spec.entries.push_back(std::move(entry));
                        }
                    }
                }
            }
        }
    } catch (const json::exception& e) {
        throw InvalidConfig(std::string("experiment spec field: ") + e.what());
    }
    if (spec.entries.empty()) throw InvalidConfig("experiment spec is empty");
    if (spec.workers < 1) throw InvalidConfig("workers must be at least 1");
    return spec;
}

std::vector<BenchRun> run_experiment(const ExperimentSpec& spec) {
    std::vector<BenchRun> runs;
    std::vector<RunConfig> configs;
    std::vector<std::size_t> config_of;  // run index -> config index, or npos
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    for (const ExperimentEntry& e : spec.entries) {
        for (const std::uint64_t seed : e.seeds) {
            BenchRun r{e.scenario, e.strategy, e.robots, e.spawn, seed, std::nullopt, {}};
            try {
                RunConfig c;
                c.scenario = resolve_scenario(e.scenario);
                c.strategy = e.strategy;
                c.n_robots = e.robots;
                c.spawn_mode = e.spawn;
                c.seed = seed;
                if (spec.timeout) c.timeout = *spec.timeout;
                validate_config(c);
                config_of.push_back(configs.size());
                configs.push_back(std::move(c));
            } catch (const std::exception& ex) {
                r.error = ex.what();
                config_of.push_back(kNone);
            }
            runs.push_back(std::move(r));
        }
    }
    const auto results = run_batch(configs, worker_cap(spec.workers));
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (config_of[i] == kNone) continue;
        const BatchItem& item = results[config_of[i]];
        runs[i].metrics = item.metrics;
        runs[i].error = item.error;
    }
    return runs;
}

ReportTable build_report(std::span<const BenchRun> runs) {
    std::vector<StrategyKind> strategies;
    std::set<std::size_t> robot_counts;
    bool multi = false;
    for (const BenchRun& r : runs) {
        if (std::find(strategies.begin(), strategies.end(), r.strategy) == strategies.end()) {
            strategies.push_back(r.strategy);
        }
        robot_counts.insert(r.robots);
        multi = multi || r.robots > 1;
    }
    const bool show_robots = robot_counts.size() > 1;

    using RowKey = std::tuple<std::string, std::string, std::size_t>;
    std::vector<RowKey> row_order;
    std::map<std::pair<RowKey, StrategyKind>, std::vector<const BenchRun*>> groups;
    for (const BenchRun& r : runs) {
        const RowKey key{r.scenario, std::string(to_string(r.spawn)), r.robots};
        if (std::find(row_order.begin(), row_order.end(), key) == row_order.end()) {
            row_order.push_back(key);
        }
        groups[{key, r.strategy}].push_back(&r);
    }

    ReportTable t;
    t.header = {"scenario", "spawn"};
    if (show_robots) t.header.emplace_back("robots");
    for (const StrategyKind s : strategies) {
        const std::string name(to_string(s));
        t.header.push_back(name + " T_topo");
        t.header.push_back(name + " T_total");
        if (multi) {
            t.header.push_back(name + " sigma");
            t.header.push_back(name + " r_o");
        }
    }

    const auto mean_of = [](const std::vector<const BenchRun*>& rs, auto get, int digits) {
        if (rs.empty()) return std::string(kMissing);
        double sum = 0.0;
        for (const BenchRun* r : rs) {
            if (!r->metrics) return std::string(kMissing);
            const std::optional<double> v = get(*r->metrics);
            if (!v) return std::string(kMissing);
            sum += *v;
        }
        return fmt(sum / static_cast<double>(rs.size()), digits);
    };

    for (const RowKey& key : row_order) {
        std::vector<std::string> row{std::get<0>(key), std::get<1>(key)};
        if (show_robots) row.push_back(std::to_string(std::get<2>(key)));
        for (const StrategyKind s : strategies) {
            const auto it = groups.find({key, s});
            const std::vector<const BenchRun*> rs =
                it == groups.end() ? std::vector<const BenchRun*>{} : it->second;
            row.push_back(mean_of(rs, [](const RunMetrics& m) { return m.t_topo; }, 1));
            row.push_back(mean_of(rs, [](const RunMetrics& m) { return m.t_total; }, 1));
            if (multi) {
                const bool single = std::get<2>(key) < 2;
                row.push_back(single ? std::string(kMissing)
                                     : mean_of(rs,
                                               [](const RunMetrics& m) -> std::optional<double> {
                                                   return m.sigma;
                                               },
                                               2));
                row.push_back(single ? std::string(kMissing)
                                     : mean_of(rs, [](const RunMetrics& m) { return m.overlap; }, 3));
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string report_csv(const ReportTable& t) {
    std::string out;
    const auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
    return out;
}

std::string report_markdown(const ReportTable& t) {
    std::string out;
    const auto line = [&](const std::vector<std::string>& cells) {
        out += '|';
        for (const auto& c : cells) out += ' ' + c + " |";
        out += '\n';
    };
    line(t.header);
    out += '|';
    for (std::size_t i = 0; i < t.header.size(); ++i) out += "---|";
    out += '\n';
    for (const auto& r : t.rows) line(r);
    return out;
}

}  // namespace explore
