#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <deque>
#include <set>

#include "tamp/dgraph.hpp"

using namespace tamp::pddl;
using namespace tamp::topk;
using namespace tamp::dgraph;

namespace {

const char* kBlocksworld = R"((define (domain blocksworld)
  (:requirements :strips :typing)
  (:types block - object)
  (:predicates (on ?x - block ?y - block) (on-table ?x - block) (clear ?x - block)
               (holding ?x - block) (arm-empty))
  (:action pickup
    :parameters (?x - block)
    :precondition (and (clear ?x) (on-table ?x) (arm-empty))
    :effect (and (holding ?x) (not (clear ?x)) (not (on-table ?x)) (not (arm-empty))))
  (:action putdown
    :parameters (?x - block)
    :precondition (and (holding ?x))
    :effect (and (clear ?x) (on-table ?x) (arm-empty) (not (holding ?x))))
  (:action stack
    :parameters (?x - block ?y - block)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (clear ?x) (on ?x ?y) (arm-empty) (not (holding ?x)) (not (clear ?y))))
  (:action unstack
    :parameters (?x - block ?y - block)
    :precondition (and (clear ?x) (on ?x ?y) (arm-empty))
    :effect (and (holding ?x) (clear ?y) (not (clear ?x)) (not (on ?x ?y)) (not (arm-empty)))))
)";

// The stacked three-block instance has exactly four acyclic plans with a
// shared two-step prefix, giving a graph with known shape.
Task stacked_task() {
    std::string prob = R"((define (problem three) (:domain blocksworld)
  (:objects a b c - block)
  (:init (on a c) (on-table c) (on-table b) (clear a) (clear b) (arm-empty))
  (:goal (and (on a b)))))";
    DomainDef d = parse_domain(kBlocksworld);
    return Task::make(d, parse_problem(prob, d));
}

// Unit-cost Dijkstra (plain BFS) over explicit adjacency, independent of the
// reverse-BFS implementation under test.
std::vector<int> oracle_distances(const DiscreteStateGraph& g) {
    std::vector<std::vector<int>> adj(g.states.size());
    for (const auto& e : g.edges) adj[static_cast<std::size_t>(e.src)].push_back(e.dst);
    std::set<int> goals(g.goal_nodes.begin(), g.goal_nodes.end());

    std::vector<int> dist(g.states.size(), -1);
    for (std::size_t start = 0; start < g.states.size(); ++start) {
        std::vector<int> d(g.states.size(), -1);
        std::deque<int> q{static_cast<int>(start)};
        d[start] = 0;
        while (!q.empty()) {
            int cur = q.front();
            q.pop_front();
            if (goals.count(cur)) {
                dist[start] = d[static_cast<std::size_t>(cur)];
                break;
            }
            for (int nxt : adj[static_cast<std::size_t>(cur)]) {
                if (d[static_cast<std::size_t>(nxt)] < 0) {
                    d[static_cast<std::size_t>(nxt)] = d[static_cast<std::size_t>(cur)] + 1;
                    q.push_back(nxt);
                }
            }
        }
    }
    return dist;
}

}  // namespace

TEST_CASE("graph merges plan traces with dedup") {
    Task task = stacked_task();
    TopKResult r = solve_topk(task, 10);
    REQUIRE(r.plans.size() == 4);
    DiscreteStateGraph g = build_graph(task, r);

    // Frozen from the known plan set: shared prefix collapses to 10 states
    // and 9 distinct edges, 4 of which end in goal-satisfying states.
    CHECK(g.states.size() == 10);
    CHECK(g.edges.size() == 9);
    CHECK(g.goal_nodes.size() == 4);
    CHECK(g.initial == 0);
    CHECK(g.node_of(task.init) == 0);

    // Every node is the target or source of some edge; no orphans.
    std::set<int> touched;
    for (const auto& e : g.edges) {
        touched.insert(e.src);
        touched.insert(e.dst);
    }
    CHECK(touched.size() == g.states.size());
}

TEST_CASE("plan paths replay over graph edges into goal nodes") {
    Task task = stacked_task();
    TopKResult r = solve_topk(task, 10);
    DiscreteStateGraph g = build_graph(task, r);
    std::set<int> goals(g.goal_nodes.begin(), g.goal_nodes.end());

    for (const auto& plan : r.plans) {
        SymbolicState cur = task.init;
        for (int action_id : plan.action_ids) {
            auto node = g.node_of(cur);
            REQUIRE(node.has_value());
            bool found = false;
            for (int ei : g.out_edges[static_cast<std::size_t>(*node)]) {
                if (g.edges[static_cast<std::size_t>(ei)].action_id == action_id) {
                    found = true;
                    break;
                }
            }
            CHECK(found);
            cur = apply(cur, task.actions[static_cast<std::size_t>(action_id)]);
        }
        auto last = g.node_of(cur);
        REQUIRE(last.has_value());
        CHECK(goals.count(*last) == 1);
    }
}

TEST_CASE("admissible actions are sorted by name and fail off-graph") {
    Task task = stacked_task();
    DiscreteStateGraph g = build_graph(task, solve_topk(task, 10));

    // The holding-a state has both the putdown detour and the direct stack.
    const GroundAction* unstack = nullptr;
    for (const auto& a : task.actions)
        if (a.name == "(unstack a c)") unstack = &a;
    REQUIRE(unstack);
    SymbolicState holding = apply(task.init, *unstack);

    auto ids = admissible_action_ids(g, task, holding);
    REQUIRE(ids.size() == 2);
    CHECK(task.actions[static_cast<std::size_t>(ids[0])].name == "(putdown a)");
    CHECK(task.actions[static_cast<std::size_t>(ids[1])].name == "(stack a b)");

    SymbolicState off({0, 1});
    CHECK_THROWS_AS(admissible_action_ids(g, task, off), std::out_of_range);
    CHECK_THROWS_AS(distance_to_goal(g, off), std::out_of_range);
}

TEST_CASE("distance to goal matches per-node BFS oracle") {
    Task task = stacked_task();
    DiscreteStateGraph g = build_graph(task, solve_topk(task, 10));
    auto want = oracle_distances(g);

    for (std::size_t i = 0; i < g.states.size(); ++i) {
        auto got = distance_to_goal(g, g.states[i]);
        CAPTURE(i);
        if (want[i] < 0) {
            CHECK_FALSE(got.has_value());
        } else {
            REQUIRE(got.has_value());
            CHECK(*got == want[i]);
        }
    }
    CHECK(distance_to_goal(g, task.init) == 2);
}

TEST_CASE("unreachable nodes report nullopt") {
    Task task = stacked_task();
    DiscreteStateGraph g = build_graph(task, solve_topk(task, 1));
    // Graft an isolated state; nothing connects it to a goal.
    SymbolicState orphan({0});
    g.index.emplace(orphan, static_cast<int>(g.states.size()));
    g.states.push_back(orphan);
    g.out_edges.push_back({});
    CHECK_FALSE(distance_to_goal(g, orphan).has_value());
}

TEST_CASE("dot export lists nodes and labeled edges deterministically") {
    Task task = stacked_task();
    DiscreteStateGraph g = build_graph(task, solve_topk(task, 10));
    std::string dot = to_dot(g, task);
    CHECK(dot.find("digraph plans {") == 0);
    CHECK(dot.find("n0 [label=\"0\" shape=box]") != std::string::npos);
    CHECK(dot.find("[label=\"(unstack a c)\"]") != std::string::npos);
    CHECK(dot.find("peripheries=2") != std::string::npos);
    CHECK(to_dot(g, task) == dot);
}
