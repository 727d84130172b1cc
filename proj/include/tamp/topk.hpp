#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tamp/pddl.hpp"

namespace tamp::topk {

struct UnsolvableError : std::runtime_error {
    UnsolvableError() : std::runtime_error("no plan exists: reachable space exhausted") {}
};

struct Plan {
    std::vector<int> action_ids;  // indices into Task::actions
    int cost = 0;                 // unit costs, so cost == length
};

struct TopKResult {
    std::vector<Plan> plans;  // ascending by (cost, action-name sequence)
    int requested_k = 0;
    bool certified = false;        // provably the k cheapest (or all that exist)
    bool budget_exhausted = false;
    long long expansions = 0;      // nodes popped
    long long generated = 0;       // nodes pushed, what node_budget caps
};

// Number of goal atoms not satisfied in s.
int goal_count(const pddl::SymbolicState& s, const std::vector<int>& goal_ids);

struct RelaxedCosts {
    int h_add;  // additive, inadmissible, guides the search
    int h_max;  // admissible, certifies top-k completeness
};

// Delete-relaxation costs from s toward the task goal; both values are
// computed in one fixpoint. Unreachable goals yield a large sentinel.
RelaxedCosts relaxed_costs(const pddl::Task& task, const pddl::SymbolicState& s);

constexpr int kUnreachable = 1 << 28;

// Best-first enumeration of acyclic plans, cheapest first. Stops once the k
// cheapest are provably found (min frontier g+h_max exceeds the k-th cost),
// the reachable space is exhausted, or node_budget generated nodes is hit.
// Throws UnsolvableError when exhaustion proves no plan exists at all.
TopKResult solve_topk(const pddl::Task& task, int k, long long node_budget = 200000);

// One "; cost = C" comment line followed by the action sequence per plan.
std::string dump_plans(const pddl::Task& task, const TopKResult& result);

}  // namespace tamp::topk
