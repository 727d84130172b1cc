#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "tamp/topk.hpp"

using namespace tamp::pddl;
using namespace tamp::topk;

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

Task make_task(const std::string& problem_text) {
    DomainDef d = parse_domain(kBlocksworld);
    ProblemDef p = parse_problem(problem_text, d);
    return Task::make(std::move(d), std::move(p));
}

std::string two_blocks(const std::string& goal) {
    return "(define (problem two) (:domain blocksworld) (:objects a b - block)\n"
           "  (:init (on-table a) (on-table b) (clear a) (clear b) (arm-empty))\n"
           "  (:goal (and " + goal + ")))";
}

std::string three_blocks(const std::string& goal) {
    return "(define (problem three) (:domain blocksworld) (:objects a b c - block)\n"
           "  (:init (on-table a) (on-table b) (on-table c) (clear a) (clear b) (clear c)"
           " (arm-empty))\n  (:goal (and " + goal + ")))";
}

// Oracle: exhaustive DFS over acyclic action sequences, collecting every
// sequence whose final state satisfies the goal.
using NamedPlan = std::pair<int, std::vector<std::string>>;

void dfs_all_plans(const Task& task, const SymbolicState& s, std::vector<SymbolicState>& path,
                   std::vector<std::string>& names, std::vector<NamedPlan>& out) {
    if (s.superset_of(task.goal_ids)) out.push_back({static_cast<int>(names.size()), names});
    for (const auto& a : task.actions) {
        if (!applicable(s, a)) continue;
        SymbolicState next = apply(s, a);
        if (std::find(path.begin(), path.end(), next) != path.end()) continue;
        path.push_back(next);
        names.push_back(a.name);
        dfs_all_plans(task, next, path, names, out);
        names.pop_back();
        path.pop_back();
    }
}

std::vector<NamedPlan> oracle_plans(const Task& task) {
    std::vector<NamedPlan> out;
    std::vector<SymbolicState> path{task.init};
    std::vector<std::string> names;
    dfs_all_plans(task, task.init, path, names, out);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<NamedPlan> named(const Task& task, const TopKResult& r) {
    std::vector<NamedPlan> out;
    for (const auto& plan : r.plans) {
        std::vector<std::string> names;
        for (int id : plan.action_ids)
            names.push_back(task.actions[static_cast<std::size_t>(id)].name);
        out.push_back({plan.cost, names});
    }
    return out;
}

}  // namespace

TEST_CASE("relaxed costs on a hand-computed chain") {
    std::string dom = R"((define (domain chain)
  (:requirements :strips)
  (:predicates (p0) (p1) (qm) (q1) (r))
  (:action a1 :parameters () :precondition (and (p0)) :effect (and (p1)))
  (:action b1 :parameters () :precondition (and (p0)) :effect (and (qm)))
  (:action b2 :parameters () :precondition (and (qm)) :effect (and (q1)))
  (:action m :parameters () :precondition (and (p1) (q1)) :effect (and (r)))))";
    std::string prob = R"((define (problem c) (:domain chain)
  (:objects) (:init (p0)) (:goal (and (r)))))";
    DomainDef d = parse_domain(dom);
    Task task = Task::make(d, parse_problem(prob, d));

    // h(p1)=1, h(qm)=1, h(q1)=2; h_add(r)=1+1+2=4, h_max(r)=1+max(1,2)=3.
    RelaxedCosts h = relaxed_costs(task, task.init);
    CHECK(h.h_add == 4);
    CHECK(h.h_max == 3);
    CHECK(goal_count(task.init, task.goal_ids) == 1);

    TopKResult r = solve_topk(task, 1);
    REQUIRE(r.plans.size() == 1);
    CHECK(r.plans[0].cost == 4);
    CHECK(r.certified);
}

TEST_CASE("single cheapest plan on two blocks") {
    Task task = make_task(two_blocks("(on a b)"));
    TopKResult r = solve_topk(task, 1);
    REQUIRE(r.plans.size() == 1);
    CHECK(r.certified);
    CHECK(named(task, r)[0] ==
          NamedPlan{2, {"(pickup a)", "(stack a b)"}});
}

TEST_CASE("top-k equals the exhaustive oracle on two blocks") {
    Task task = make_task(two_blocks("(on a b)"));
    auto want = oracle_plans(task);
    // Acyclicity leaves exactly one way to build the tower from scratch.
    CHECK(want.size() == 1);
    TopKResult r = solve_topk(task, 10);
    CHECK(r.certified);
    CHECK(named(task, r) == want);
}

TEST_CASE("top-k equals the exhaustive oracle on a stacked start") {
    // Acyclicity prunes blocksworld hard; this instance has exactly four
    // plans including the teardown-and-rebuild detour.
    std::string prob = R"((define (problem three) (:domain blocksworld)
  (:objects a b c - block)
  (:init (on a c) (on-table c) (on-table b) (clear a) (clear b) (arm-empty))
  (:goal (and (on a b)))))";
    DomainDef d = parse_domain(kBlocksworld);
    Task task = Task::make(d, parse_problem(prob, d));
    auto want = oracle_plans(task);
    REQUIRE(want.size() == 4);

    for (int k : {1, 2, 3}) {
        TopKResult r = solve_topk(task, k);
        CAPTURE(k);
        CHECK(r.certified);
        CHECK_FALSE(r.budget_exhausted);
        auto got = named(task, r);
        REQUIRE(got.size() == static_cast<std::size_t>(k));
        std::vector<NamedPlan> head(want.begin(), want.begin() + k);
        CHECK(got == head);
    }

    // Requesting more than exist returns them all.
    TopKResult all = solve_topk(task, 1000000, 2000000);
    CHECK(all.certified);
    CHECK(named(task, all) == want);
}

TEST_CASE("top-k equals the oracle under heavy cost ties") {
    // Two interchangeable achievers per goal atom give exactly eight plans,
    // all of cost two, so ordering is decided purely by the tie-break.
    std::string dom = R"((define (domain ties)
  (:requirements :strips)
  (:predicates (g1) (g2))
  (:action a :parameters () :precondition (and) :effect (and (g1)))
  (:action b :parameters () :precondition (and) :effect (and (g2)))
  (:action c :parameters () :precondition (and) :effect (and (g1)))
  (:action d :parameters () :precondition (and) :effect (and (g2)))))";
    std::string prob = "(define (problem t) (:domain ties) (:objects) (:init)"
                       " (:goal (and (g1) (g2))))";
    DomainDef d = parse_domain(dom);
    Task task = Task::make(d, parse_problem(prob, d));
    auto want = oracle_plans(task);
    REQUIRE(want.size() == 8);
    for (const auto& plan : want) CHECK(plan.first == 2);

    for (std::size_t k = 1; k <= want.size(); ++k) {
        TopKResult r = solve_topk(task, static_cast<int>(k));
        CAPTURE(k);
        CHECK(r.certified);
        std::vector<NamedPlan> head(want.begin(), want.begin() + static_cast<long>(k));
        CHECK(named(task, r) == head);
    }
}

TEST_CASE("satisfied goal yields the empty plan first") {
    Task task = make_task(two_blocks("(on-table a)"));
    TopKResult r = solve_topk(task, 5);
    CHECK(r.certified);
    auto got = named(task, r);
    REQUIRE(got.size() == 3);
    CHECK(got[0] == NamedPlan{0, {}});
    CHECK(got[1] == NamedPlan{1, {"(pickup b)"}});
    CHECK(got[2] == NamedPlan{2, {"(pickup b)", "(stack b a)"}});
    CHECK(got == oracle_plans(task));
}

TEST_CASE("unsolvable goal throws after exhausting the space") {
    Task task = make_task(two_blocks("(on a a)"));
    CHECK_THROWS_AS(solve_topk(task, 1), UnsolvableError);
}

TEST_CASE("node budget flags a partial result") {
    Task task = make_task(three_blocks("(on a b) (on b c)"));
    TopKResult r = solve_topk(task, 100000, 10);
    CHECK(r.budget_exhausted);
    CHECK_FALSE(r.certified);
    CHECK(r.generated <= 10);
}

TEST_CASE("equal-cost plans are ordered by action name sequence") {
    Task task = make_task(three_blocks("(on a b)"));
    TopKResult r = solve_topk(task, 30);
    auto got = named(task, r);
    for (std::size_t i = 1; i < got.size(); ++i) {
        CHECK(got[i - 1].first <= got[i].first);
        if (got[i - 1].first == got[i].first) CHECK(got[i - 1].second < got[i].second);
    }
}

TEST_CASE("solve_topk is deterministic") {
    Task task = make_task(three_blocks("(on c a)"));
    TopKResult r1 = solve_topk(task, 15);
    TopKResult r2 = solve_topk(task, 15);
    CHECK(named(task, r1) == named(task, r2));
    CHECK(r1.expansions == r2.expansions);
    CHECK(r1.generated == r2.generated);
}

TEST_CASE("plan dump format") {
    Task task = make_task(two_blocks("(on-table a)"));
    TopKResult r = solve_topk(task, 2);
    CHECK(dump_plans(task, r) == "; cost = 0\n\n; cost = 1\n(pickup b)\n");
}
