#include "explore/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>

#include "explore/errors.hpp"
#include "json.hpp"

namespace explore {

using nlohmann::json;

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::Complete: return "complete";
        case Termination::NoFrontier: return "no_frontier";
        case Termination::Timeout: return "timeout";
    }
    return "?";
}

namespace {

Termination parse_termination(std::string_view s) {
    if (s == "complete") return Termination::Complete;
    if (s == "no_frontier") return Termination::NoFrontier;
    if (s == "timeout") return Termination::Timeout;
    throw MalformedLog("unknown termination '" + std::string(s) + "'");
}

template <typename... Args>
void appendf(std::string& out, const char* fmt, Args... args) {
    char buf[160];
    const int n = std::snprintf(buf, sizeof buf, fmt, args...);
    out.append(buf, static_cast<std::size_t>(n));
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double to_double(std::string_view s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(std::string(s), &used);
        if (used != s.size()) throw MalformedLog("bad number '" + std::string(s) + "'");
        return v;
    } catch (const std::logic_error&) {
        throw MalformedLog("bad number '" + std::string(s) + "'");
    }
}

unsigned long long to_uint(std::string_view s) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(std::string(s), &used);
        if (used != s.size() || s.front() == '-') throw MalformedLog("bad integer");
        return v;
    } catch (const std::logic_error&) {
        throw MalformedLog("bad integer '" + std::string(s) + "'");
    }
}

}  // namespace

std::string serialize_events(const EventLog& log) {
    std::string out;
    out.reserve(log.events.size() * 24 + 64);
    appendf(out, "# grid,%d,%d,%.17g\n", log.width, log.height, log.resolution);
    for (const Event& e : log.events) {
        switch (e.kind) {
            case EventKind::Observation:
                appendf(out, "O,%.6f,%u,%zu,%c\n", e.t, e.robot, e.cell, state_char(e.state));
                break;
            case EventKind::Goal:
                appendf(out, "G,%.6f,%u,%.6f,%.6f\n", e.t, e.robot, e.pose.x, e.pose.y);
                break;
            case EventKind::Move:
                appendf(out, "M,%.6f,%u,%zu,%.6f\n", e.t, e.robot, e.cell, e.elapsed);
                break;
            case EventKind::Termination:
                appendf(out, "T,%.6f,%s\n", e.t, std::string(to_string(e.reason)).c_str());
                break;
        }
    }
    return out;
}

EventLog parse_events(std::string_view csv) {
    EventLog log;
    bool header = false;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < csv.size()) {
        std::size_t end = csv.find('\n', start);
        if (end == std::string_view::npos) end = csv.size();
        std::string_view line = csv.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        const auto need = [&](std::size_t n) {
            if (f.size() != n) {
                throw MalformedLog("line " + std::to_string(line_no) + ": expected " +
                                   std::to_string(n) + " fields");
            }
        };
        if (f[0] == "# grid") {
            need(4);
            log.width = static_cast<int>(to_uint(f[1]));
            log.height = static_cast<int>(to_uint(f[2]));
            log.resolution = to_double(f[3]);
            header = true;
            continue;
        }
        Event e;
        if (f[0] == "O") {
            need(5);
            e.kind = EventKind::Observation;
            e.cell = to_uint(f[3]);
            if (f[4] == ".") {
                e.state = CellState::Free;
            } else if (f[4] == "#") {
                e.state = CellState::Occupied;
            } else {
                throw MalformedLog("line " + std::to_string(line_no) + ": bad cell state");
            }
        } else if (f[0] == "G") {
            need(5);
            e.kind = EventKind::Goal;
            e.pose = {to_double(f[3]), to_double(f[4]), 0.0};
        } else if (f[0] == "M") {
            need(5);
            e.kind = EventKind::Move;
            e.cell = to_uint(f[3]);
            e.elapsed = to_double(f[4]);
        } else if (f[0] == "T") {
            need(3);
            e.kind = EventKind::Termination;
            e.t = to_double(f[1]);
            e.reason = parse_termination(f[2]);
            log.events.push_back(e);
            continue;
        } else {
            throw MalformedLog("line " + std::to_string(line_no) + ": unknown event '" +
                               std::string(f[0]) + "'");
        }
        e.t = to_double(f[1]);
        e.robot = static_cast<std::uint32_t>(to_uint(f[2]));
        log.events.push_back(e);
    }
    if (!header) throw MalformedLog("missing grid header");
    return log;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
    for (const char ch : bytes) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::optional<double> time_at_ratio(const CoverageCurve& curve, double r) {
    if (!(r > 0.0 && r <= 1.0)) throw InvalidRatio("ratio must lie in (0, 1]");
    for (const CoverageSample& s : curve.samples) {
        if (s.ratio >= r) return s.time;
    }
    return std::nullopt;
}

double sigma(std::span<const double> areas) {
    if (areas.empty()) throw EmptyInput("sigma of an empty list");
    double mean = 0.0;
    for (const double a : areas) {
        if (a < 0.0) throw ValueError("negative area");
        mean += a;
    }
    mean /= static_cast<double>(areas.size());
    double ss = 0.0;
    for (const double a : areas) ss += (a - mean) * (a - mean);
    return std::sqrt(ss / static_cast<double>(areas.size()));
}

double overlap_ratio(std::span<const std::vector<std::size_t>> known, std::size_t total_cells) {
    if (known.size() < 2) throw InvalidInput("overlap needs at least two robots");
    if (total_cells == 0) throw InvalidInput("total cell count is zero");
    std::size_t sum = 0;
    std::vector<std::size_t> all;
    for (const auto& k : known) {
        sum += k.size();
        all.insert(all.end(), k.begin(), k.end());
    }
    std::sort(all.begin(), all.end());
    const auto unique = static_cast<std::size_t>(std::unique(all.begin(), all.end()) - all.begin());
    return static_cast<double>(sum - unique) / static_cast<double>(total_cells);
}

Attribution attribute_coverage(const EventLog& log, std::size_t n_robots,
                               std::span<const std::uint8_t> mask, bool free_only) {
    const std::size_t cells = static_cast<std::size_t>(log.width) * static_cast<std::size_t>(log.height);
    if (!mask.empty() && mask.size() != cells) {
        throw MalformedLog("mask size does not match the logged grid");
    }
    std::vector<std::vector<std::uint8_t>> seen(n_robots, std::vector<std::uint8_t>(cells, 0));
    Attribution out;
    out.known.resize(n_robots);
    double last_t = -std::numeric_limits<double>::infinity();
    for (const Event& e : log.events) {
        if (e.t < last_t) throw MalformedLog("event times decrease");
        last_t = e.t;
        if (e.kind != EventKind::Observation) continue;
        if (e.robot >= n_robots) throw MalformedLog("robot id out of range");
        if (e.cell >= cells) throw MalformedLog("cell index out of range");
        if (e.state == CellState::Unknown) throw MalformedLog("observation of Unknown state");
        if (free_only && e.state != CellState::Free) continue;
        if (!mask.empty() && mask[e.cell] == 0) continue;
        auto& flag = seen[e.robot][e.cell];
        if (flag) continue;
        flag = 1;
        out.known[e.robot].push_back(e.cell);
    }
    const double cell_area = log.resolution * log.resolution;
    for (auto& k : out.known) {
        std::sort(k.begin(), k.end());
        out.areas.push_back(static_cast<double>(k.size()) * cell_area);
    }
    return out;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

std::string csv_num(const std::optional<double>& v) {
    if (!v) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return buf;
}

}  // namespace

std::string metrics_to_json(const RunMetrics& m) {
    json j;
    j["scenario"] = m.scenario;
    j["strategy"] = m.strategy;
    j["n_robots"] = m.n_robots;
    j["spawn_mode"] = m.spawn_mode;
    j["seed"] = m.seed;
    j["config_hash"] = m.config_hash;
    j["T_topo"] = opt(m.t_topo);
    j["T_total"] = opt(m.t_total);
    j["S_i"] = m.areas;
    j["sigma"] = m.sigma;
    j["r_o"] = opt(m.overlap);
    j["S_total"] = m.s_total;
    j["final_ratio"] = m.final_ratio;
    j["sim_time"] = m.sim_time;
    j["termination"] = std::string(to_string(m.termination));
    return j.dump(2) + "\n";
}

RunMetrics metrics_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        RunMetrics m;
        m.scenario = j.at("scenario").get<std::string>();
        m.strategy = j.at("strategy").get<std::string>();
        m.n_robots = j.at("n_robots").get<std::size_t>();
        m.spawn_mode = j.at("spawn_mode").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.config_hash = j.at("config_hash").get<std::uint64_t>();
        m.t_topo = opt_from(j, "T_topo");
        m.t_total = opt_from(j, "T_total");
        m.areas = j.at("S_i").get<std::vector<double>>();
        m.sigma = j.at("sigma").get<double>();
        m.overlap = opt_from(j, "r_o");
        m.s_total = j.at("S_total").get<double>();
        m.final_ratio = j.at("final_ratio").get<double>();
        m.sim_time = j.at("sim_time").get<double>();
        const auto term = j.at("termination").get<std::string>();
        if (term == "complete") {
            m.termination = Termination::Complete;
        } else if (term == "no_frontier") {
            m.termination = Termination::NoFrontier;
        } else if (term == "timeout") {
            m.termination = Termination::Timeout;
        } else {
            throw ParseError("unknown termination '" + term + "'");
        }
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("metrics json: ") + e.what());
    }
}

std::string metrics_csv_header() {
    return "scenario,strategy,n_robots,spawn_mode,seed,T_topo,T_total,sigma,r_o,S_total,"
           "final_ratio,sim_time,termination,config_hash";
}

std::string metrics_csv_row(const RunMetrics& m) {
    std::ostringstream os;
    char buf[64];
    os << m.scenario << ',' << m.strategy << ',' << m.n_robots << ',' << m.spawn_mode << ','
       << m.seed << ',' << csv_num(m.t_topo) << ',' << csv_num(m.t_total) << ','
       << csv_num(m.sigma) << ',' << csv_num(m.overlap) << ',' << csv_num(m.s_total) << ','
       << csv_num(m.final_ratio) << ',' << csv_num(m.sim_time) << ',' << to_string(m.termination);
    std::snprintf(buf, sizeof buf, ",%016llx", static_cast<unsigned long long>(m.config_hash));
    os << buf;
    return os.str();
}

std::string coverage_to_csv(const CoverageCurve& curve) {
    std::string out = "time,ratio\n";
    for (const CoverageSample& s : curve.samples) appendf(out, "%.6f,%.9f\n", s.time, s.ratio);
    return out;
}

}  // namespace explore
