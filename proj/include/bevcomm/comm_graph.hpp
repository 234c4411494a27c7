#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bevcomm/grid.hpp"

namespace bevcomm {

// Directed communication graph for one exchange round. The opening round is
// fully connected; later rounds keep exactly the links whose selection mask
// kept at least one cell, so empty messages never occupy a link.

class CommGraph {
public:
    CommGraph(int round, int agent_count);

    int round() const { return round_; }
    int agent_count() const { return agent_count_; }

    bool edge(int from, int to) const;
    void set_edge(int from, int to, bool present);

    int edge_count() const;

private:
    int round_;
    int agent_count_;
    std::vector<std::uint8_t> adjacency_;  // row-major from*agent_count+to, diagonal unused
};

// Round 0 takes no masks and yields the complete graph; every later round
// requires the full mask matrix (masks[i][j] = what i selected for j; the
// diagonal is ignored).
CommGraph build_graph(int round_k, int agent_count,
                      const std::optional<std::vector<std::vector<SelectionMask>>>& masks);

}  // namespace bevcomm
