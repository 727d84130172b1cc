#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tamp/pddl.hpp"
#include "tamp/topk.hpp"

namespace tamp::dgraph {

struct Edge {
    int src = -1;
    int dst = -1;
    int action_id = -1;
};

// Union of the top-k plan traces: deduplicated symbolic states plus the
// actions that connect them. The hybrid search restricts expansion to the
// actions admissible here.
struct DiscreteStateGraph {
    std::vector<pddl::SymbolicState> states;
    std::map<pddl::SymbolicState, int> index;
    std::vector<Edge> edges;
    std::vector<std::vector<int>> out_edges;  // per node, sorted by action name
    int initial = -1;
    std::vector<int> goal_nodes;

    std::optional<int> node_of(const pddl::SymbolicState& s) const;
};

DiscreteStateGraph build_graph(const pddl::Task& task, const topk::TopKResult& result);

// Action ids leaving the node for s, ordered by action name. Throws
// std::out_of_range when s is not a graph state.
std::vector<int> admissible_action_ids(const DiscreteStateGraph& g, const pddl::Task& task,
                                       const pddl::SymbolicState& s);

// Unit-cost hops to the nearest goal node, nullopt when no goal is reachable.
// Throws std::out_of_range when s is not a graph state.
std::optional<int> distance_to_goal(const DiscreteStateGraph& g, const pddl::SymbolicState& s);

std::string to_dot(const DiscreteStateGraph& g, const pddl::Task& task);

}  // namespace tamp::dgraph
