#include "tamp/dgraph.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tamp::dgraph {

using pddl::SymbolicState;
using pddl::Task;

std::optional<int> DiscreteStateGraph::node_of(const SymbolicState& s) const {
    auto it = index.find(s);
    if (it == index.end()) return std::nullopt;
    return it->second;
}

DiscreteStateGraph build_graph(const Task& task, const topk::TopKResult& result) {
    DiscreteStateGraph g;
    auto intern = [&](const SymbolicState& s) {
        auto it = g.index.find(s);
        if (it != g.index.end()) return it->second;
        int id = static_cast<int>(g.states.size());
        g.states.push_back(s);
        g.index.emplace(s, id);
        return id;
    };

    g.initial = intern(task.init);
    std::set<std::pair<int, int>> seen_edges;  // (src, action) fixes dst
    for (const auto& plan : result.plans) {
        SymbolicState cur = task.init;
        int cur_id = g.initial;
        for (int action_id : plan.action_ids) {
            SymbolicState next = pddl::apply(cur, task.actions[static_cast<std::size_t>(action_id)]);
            int next_id = intern(next);
            if (seen_edges.insert({cur_id, action_id}).second)
                g.edges.push_back({cur_id, next_id, action_id});
            cur = std::move(next);
            cur_id = next_id;
        }
    }

    g.out_edges.assign(g.states.size(), {});
    for (std::size_t ei = 0; ei < g.edges.size(); ++ei)
        g.out_edges[static_cast<std::size_t>(g.edges[ei].src)].push_back(static_cast<int>(ei));
    for (auto& out : g.out_edges) {
        std::sort(out.begin(), out.end(), [&](int a, int b) {
            const auto& na = task.actions[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(a)].action_id)].name;
            const auto& nb = task.actions[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(b)].action_id)].name;
            return na < nb;
        });
    }

    for (std::size_t i = 0; i < g.states.size(); ++i)
        if (g.states[i].superset_of(task.goal_ids)) g.goal_nodes.push_back(static_cast<int>(i));
    return g;
}

std::vector<int> admissible_action_ids(const DiscreteStateGraph& g, const Task& task,
                                       const SymbolicState& s) {
    auto node = g.node_of(s);
    if (!node) throw std::out_of_range("state is not part of the discrete graph");
    std::vector<int> out;
    for (int ei : g.out_edges[static_cast<std::size_t>(*node)])
        out.push_back(g.edges[static_cast<std::size_t>(ei)].action_id);
    (void)task;
    return out;
}

std::optional<int> distance_to_goal(const DiscreteStateGraph& g, const SymbolicState& s) {
    auto node = g.node_of(s);
    if (!node) throw std::out_of_range("state is not part of the discrete graph");

    std::vector<std::vector<int>> in_edges(g.states.size());
    for (const auto& e : g.edges) in_edges[static_cast<std::size_t>(e.dst)].push_back(e.src);

    std::vector<int> dist(g.states.size(), -1);
    std::deque<int> queue;
    for (int gi : g.goal_nodes) {
        dist[static_cast<std::size_t>(gi)] = 0;
        queue.push_back(gi);
    }
    while (!queue.empty()) {
        int cur = queue.front();
        queue.pop_front();
        for (int prev : in_edges[static_cast<std::size_t>(cur)]) {
            if (dist[static_cast<std::size_t>(prev)] >= 0) continue;
            dist[static_cast<std::size_t>(prev)] = dist[static_cast<std::size_t>(cur)] + 1;
            queue.push_back(prev);
        }
    }
    int d = dist[static_cast<std::size_t>(*node)];
    if (d < 0) return std::nullopt;
    return d;
}

std::string to_dot(const DiscreteStateGraph& g, const Task& task) {
    std::ostringstream out;
    out << "digraph plans {\n  rankdir=LR;\n";
    std::set<int> goal_set(g.goal_nodes.begin(), g.goal_nodes.end());
    for (std::size_t i = 0; i < g.states.size(); ++i) {
        out << "  n" << i << " [label=\"" << i << "\"";
        if (static_cast<int>(i) == g.initial) out << " shape=box";
        if (goal_set.count(static_cast<int>(i))) out << " peripheries=2";
        out << "];\n";
    }
    std::vector<Edge> sorted = g.edges;
    std::sort(sorted.begin(), sorted.end(), [&](const Edge& a, const Edge& b) {
        if (a.src != b.src) return a.src < b.src;
        return task.actions[static_cast<std::size_t>(a.action_id)].name <
               task.actions[static_cast<std::size_t>(b.action_id)].name;
    });
    for (const auto& e : sorted) {
        out << "  n" << e.src << " -> n" << e.dst << " [label=\""
            << task.actions[static_cast<std::size_t>(e.action_id)].name << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace tamp::dgraph
