#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "explore/grid.hpp"

namespace explore {

enum class Termination { Complete, NoFrontier, Timeout };

std::string_view to_string(Termination t);

enum class EventKind : std::uint8_t { Observation, Goal, Move, Termination };

// One row of the run log. Fields not used by a kind stay zero.
//   Observation: robot, cell (linear index), state
//   Goal:        robot, pose
//   Move:        robot, cell, elapsed (time charged for the step)
//   Termination: reason
struct Event {
    EventKind kind = EventKind::Observation;
    double t = 0.0;
    std::uint32_t robot = 0;
    std::size_t cell = 0;
    CellState state = CellState::Unknown;
    Pose pose{};
    double elapsed = 0.0;
    Termination reason = Termination::Complete;
};

struct EventLog {
    int width = 0;
    int height = 0;
    double resolution = kDefaultResolution;
    std::vector<Event> events;
};

// CSV, one line per event, fixed formatting. Byte-identical logs are
// identical runs.
std::string serialize_events(const EventLog& log);
EventLog parse_events(std::string_view csv);  // throws MalformedLog

// FNV-1a 64.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace explore
