#include "bevcomm/comm_graph.hpp"

#include <string>

namespace bevcomm {

CommGraph::CommGraph(int round, int agent_count)
    : round_(round),
      agent_count_(agent_count),
      adjacency_(static_cast<std::size_t>(agent_count) * static_cast<std::size_t>(agent_count), 0) {
    if (round < 0) {
        throw ProtocolError("graph round must be non-negative");
    }
    if (agent_count < 1) {
        throw ProtocolError("graph needs at least one agent");
    }
}

bool CommGraph::edge(int from, int to) const {
    if (from < 0 || from >= agent_count_ || to < 0 || to >= agent_count_) {
        throw DimensionError("graph edge query out of range");
    }
    if (from == to) return false;
    return adjacency_[static_cast<std::size_t>(from) * agent_count_ + to] != 0;
}

void CommGraph::set_edge(int from, int to, bool present) {
    if (from < 0 || from >= agent_count_ || to < 0 || to >= agent_count_ || from == to) {
        throw DimensionError("graph edge update out of range");
    }
    adjacency_[static_cast<std::size_t>(from) * agent_count_ + to] = present ? 1 : 0;
}

int CommGraph::edge_count() const {
    int n = 0;
    for (int i = 0; i < agent_count_; ++i) {
        for (int j = 0; j < agent_count_; ++j) {
            if (i != j && adjacency_[static_cast<std::size_t>(i) * agent_count_ + j]) ++n;
        }
    }
    return n;
}

CommGraph build_graph(int round_k, int agent_count,
                      const std::optional<std::vector<std::vector<SelectionMask>>>& masks) {
    CommGraph graph(round_k, agent_count);
    if (round_k == 0) {
        if (masks.has_value()) {
            throw ProtocolError("round 0 graph construction takes no masks");
        }
        for (int i = 0; i < agent_count; ++i) {
            for (int j = 0; j < agent_count; ++j) {
                if (i != j) graph.set_edge(i, j, true);
            }
        }
        return graph;
    }
    if (!masks.has_value()) {
        throw ProtocolError("round " + std::to_string(round_k) +
                            " graph construction needs the selection masks");
    }
    if (static_cast<int>(masks->size()) != agent_count) {
        throw DimensionError("mask matrix must have one row per agent");
    }
    for (int i = 0; i < agent_count; ++i) {
        if (static_cast<int>((*masks)[static_cast<std::size_t>(i)].size()) != agent_count) {
            throw DimensionError("mask matrix row " + std::to_string(i) +
                                 " must have one entry per agent");
        }
        for (int j = 0; j < agent_count; ++j) {
            if (i == j) continue;
            graph.set_edge(i, j, (*masks)[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].any());
        }
    }
    return graph;
}

}  // namespace bevcomm
