#include "explore/connectivity.hpp"

#include <algorithm>

namespace explore {

std::vector<int> bfs_distances(const OccupancyGrid& g, Cell start, StateMask traversable,
                               std::span<const Cell> blocked) {
    std::vector<int> dist(g.size(), kUnreachable);
    if (!g.in_bounds(start)) return dist;
    constexpr int kBlocked = -2;
    for (const Cell& b : blocked) {
        if (g.in_bounds(b)) dist[g.index(b)] = kBlocked;
    }
    std::vector<std::size_t> queue;
    queue.reserve(g.size() / 4 + 1);
    dist[g.index(start)] = 0;
    queue.push_back(g.index(start));
    const int w = g.width();
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::size_t idx = queue[head];
        const Cell c = g.cell_of(idx);
        const int d = dist[idx] + 1;
        for (const Cell& n : kNeighbors4) {
            const int r = c.row + n.row;
            const int col = c.col + n.col;
            if (!g.in_bounds(r, col)) continue;
            const std::size_t nidx = static_cast<std::size_t>(r) * w + col;
            if (dist[nidx] != kUnreachable || !traversable.contains(g[nidx])) continue;
            dist[nidx] = d;
            queue.push_back(nidx);
        }
    }
    for (int& d : dist) {
        if (d == kBlocked) d = kUnreachable;
    }
    return dist;
}

int label_components(const OccupancyGrid& g, StateMask states, std::vector<int>& labels) {
    labels.assign(g.size(), -1);
    int next = 0;
    std::vector<std::size_t> stack;
    for (std::size_t seed = 0; seed < g.size(); ++seed) {
        if (labels[seed] != -1 || !states.contains(g[seed])) continue;
        labels[seed] = next;
        stack.push_back(seed);
        while (!stack.empty()) {
            const Cell c = g.cell_of(stack.back());
            stack.pop_back();
            for (const Cell& n : kNeighbors4) {
                const Cell nc{c.row + n.row, c.col + n.col};
                if (!g.in_bounds(nc)) continue;
                const std::size_t nidx = g.index(nc);
                if (labels[nidx] != -1 || !states.contains(g[nidx])) continue;
                labels[nidx] = next;
                stack.push_back(nidx);
            }
        }
        ++next;
    }
    return next;
}

bool free_space_connected(const OccupancyGrid& g) {
    std::vector<int> labels;
    return label_components(g, kFreeOnly, labels) <= 1;
}

std::vector<std::uint8_t> observable_mask(const OccupancyGrid& truth) {
    std::vector<std::uint8_t> mask(truth.size(), 0);
    for (int r = 0; r < truth.height(); ++r) {
        for (int c = 0; c < truth.width(); ++c) {
            if (truth.at(r, c) != CellState::Free) continue;
            mask[truth.index({r, c})] = 1;
            for (const Cell& n : kNeighbors4) {
                const Cell nc{r + n.row, c + n.col};
                if (truth.in_bounds(nc) && truth.at(nc) == CellState::Occupied) {
                    mask[truth.index(nc)] = 1;
                }
            }
        }
    }
    return mask;
}

std::vector<int> obstacle_clearance(const OccupancyGrid& g, int cap) {
    std::vector<int> dist(g.size(), cap);
    std::vector<std::size_t> queue;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] == CellState::Occupied) {
            dist[i] = 0;
            queue.push_back(i);
        }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const Cell c = g.cell_of(queue[head]);
        const int d = dist[queue[head]] + 1;
        if (d >= cap) continue;
        for (const Cell& n : kNeighbors8) {
            const Cell nc{c.row + n.row, c.col + n.col};
            if (!g.in_bounds(nc)) continue;
            const std::size_t nidx = g.index(nc);
            if (dist[nidx] <= d) continue;
            dist[nidx] = d;
            queue.push_back(nidx);
        }
    }
    return dist;
}

}  // namespace explore
