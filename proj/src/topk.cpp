#include "tamp/topk.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace tamp::topk {

using pddl::SymbolicState;
using pddl::Task;

int goal_count(const SymbolicState& s, const std::vector<int>& goal_ids) {
    int missing = 0;
    for (int id : goal_ids)
        if (!s.contains(id)) ++missing;
    return missing;
}

RelaxedCosts relaxed_costs(const Task& task, const SymbolicState& s) {
    std::vector<int> cost(static_cast<std::size_t>(task.atoms.size()), kUnreachable);
    for (int id : s.ids()) cost[static_cast<std::size_t>(id)] = 0;

    // Bellman-Ford style fixpoint; negative preconditions are ignored in the
    // relaxation, which keeps h_max admissible for our delete-style domains.
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& a : task.actions) {
            int sum = 1;
            bool reachable = true;
            for (int id : a.pre_pos) {
                int c = cost[static_cast<std::size_t>(id)];
                if (c >= kUnreachable) {
                    reachable = false;
                    break;
                }
                sum += c;
            }
            if (!reachable) continue;
            int add_cost = std::min(sum, kUnreachable);
            for (int id : a.add) {
                auto& slot = cost[static_cast<std::size_t>(id)];
                if (add_cost < slot) {
                    slot = add_cost;
                    changed = true;
                }
            }
        }
    }

    std::vector<int> mcost(static_cast<std::size_t>(task.atoms.size()), kUnreachable);
    for (int id : s.ids()) mcost[static_cast<std::size_t>(id)] = 0;
    changed = true;
    while (changed) {
        changed = false;
        for (const auto& a : task.actions) {
            int worst = 0;
            bool reachable = true;
            for (int id : a.pre_pos) {
                int c = mcost[static_cast<std::size_t>(id)];
                if (c >= kUnreachable) {
                    reachable = false;
                    break;
                }
                worst = std::max(worst, c);
            }
            if (!reachable) continue;
            int max_cost = 1 + worst;
            for (int id : a.add) {
                auto& slot = mcost[static_cast<std::size_t>(id)];
                if (max_cost < slot) {
                    slot = max_cost;
                    changed = true;
                }
            }
        }
    }

    RelaxedCosts out{0, 0};
    for (int id : task.goal_ids) {
        int ca = cost[static_cast<std::size_t>(id)];
        int cm = mcost[static_cast<std::size_t>(id)];
        if (ca >= kUnreachable || cm >= kUnreachable) return {kUnreachable, kUnreachable};
        out.h_add += ca;
        out.h_max = std::max(out.h_max, cm);
    }
    return out;
}

namespace {

struct PathNode {
    SymbolicState state;
    int g = 0;
    int parent = -1;
    int action_id = -1;  // edge into this node
    int name_rank = -1;
    int f_add = 0;
    int f_max = 0;
};

// Lexicographic comparison of the action-name sequences of two paths.
int compare_paths(const std::vector<PathNode>& arena, int ia, int ib) {
    std::vector<int> sa, sb;
    for (int i = ia; i >= 0; i = arena[static_cast<std::size_t>(i)].parent)
        if (arena[static_cast<std::size_t>(i)].name_rank >= 0)
            sa.push_back(arena[static_cast<std::size_t>(i)].name_rank);
    for (int i = ib; i >= 0; i = arena[static_cast<std::size_t>(i)].parent)
        if (arena[static_cast<std::size_t>(i)].name_rank >= 0)
            sb.push_back(arena[static_cast<std::size_t>(i)].name_rank);
    std::reverse(sa.begin(), sa.end());
    std::reverse(sb.begin(), sb.end());
    if (sa < sb) return -1;
    if (sb < sa) return 1;
    return 0;
}

}  // namespace

TopKResult solve_topk(const Task& task, int k, long long node_budget) {
    TopKResult result;
    result.requested_k = k;
    if (k <= 0) {
        result.certified = true;
        return result;
    }

    std::vector<int> name_rank(task.actions.size());
    {
        std::vector<int> order(task.actions.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return task.actions[static_cast<std::size_t>(a)].name <
                                             task.actions[static_cast<std::size_t>(b)].name; });
        for (std::size_t i = 0; i < order.size(); ++i)
            name_rank[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    }

    std::vector<PathNode> arena;
    std::map<SymbolicState, RelaxedCosts> hcache;
    auto heuristics = [&](const SymbolicState& s) {
        auto it = hcache.find(s);
        if (it != hcache.end()) return it->second;
        RelaxedCosts h = relaxed_costs(task, s);
        hcache.emplace(s, h);
        return h;
    };

    auto cmp = [&](int a, int b) {
        const PathNode& na = arena[static_cast<std::size_t>(a)];
        const PathNode& nb = arena[static_cast<std::size_t>(b)];
        if (na.f_add != nb.f_add) return na.f_add > nb.f_add;  // min-heap via greater
        return compare_paths(arena, a, b) > 0;
    };
    std::priority_queue<int, std::vector<int>, decltype(cmp)> frontier(cmp);
    std::multiset<int> frontier_fmax;

    {
        RelaxedCosts h0 = heuristics(task.init);
        if (h0.h_max >= kUnreachable) throw UnsolvableError();
        arena.push_back({task.init, 0, -1, -1, -1, h0.h_add, h0.h_max});
        frontier.push(0);
        frontier_fmax.insert(h0.h_max);
        result.generated = 1;
    }

    struct Harvest {
        int node = -1;
        int cost = 0;
    };
    std::vector<Harvest> harvested;

    auto kth_cost = [&]() {
        // k-th smallest cost among harvested plans, or INT_MAX when fewer.
        if (static_cast<int>(harvested.size()) < k) return kUnreachable;
        std::vector<int> costs;
        costs.reserve(harvested.size());
        for (const auto& h : harvested) costs.push_back(h.cost);
        std::nth_element(costs.begin(), costs.begin() + (k - 1), costs.end());
        return costs[static_cast<std::size_t>(k - 1)];
    };

    int current_kth = kUnreachable;
    while (!frontier.empty()) {
        if (static_cast<int>(harvested.size()) >= k && !frontier_fmax.empty() &&
            *frontier_fmax.begin() > current_kth) {
            result.certified = true;
            break;
        }
        int ni = frontier.top();
        frontier.pop();
        const PathNode popped = arena[static_cast<std::size_t>(ni)];
        frontier_fmax.erase(frontier_fmax.find(popped.f_max));
        ++result.expansions;

        if (popped.state.superset_of(task.goal_ids)) {
            harvested.push_back({ni, popped.g});
            current_kth = kth_cost();
        }

        for (std::size_t ai = 0; ai < task.actions.size(); ++ai) {
            const auto& action = task.actions[ai];
            if (!pddl::applicable(popped.state, action)) continue;
            SymbolicState next = pddl::apply(popped.state, action);

            bool cycle = false;
            for (int i = ni; i >= 0; i = arena[static_cast<std::size_t>(i)].parent) {
                if (arena[static_cast<std::size_t>(i)].state == next) {
                    cycle = true;
                    break;
                }
            }
            if (cycle) continue;

            if (result.generated >= node_budget) {
                result.budget_exhausted = true;
                break;
            }
            RelaxedCosts h = heuristics(next);
            if (h.h_max >= kUnreachable) continue;  // dead end
            PathNode child{std::move(next), popped.g + 1,     ni,
                           static_cast<int>(ai), name_rank[ai], 0, 0};
            child.f_add = child.g + h.h_add;
            child.f_max = child.g + h.h_max;
            arena.push_back(std::move(child));
            int id = static_cast<int>(arena.size()) - 1;
            frontier.push(id);
            frontier_fmax.insert(arena.back().f_max);
            ++result.generated;
        }
        if (result.budget_exhausted) break;
    }

    if (!result.budget_exhausted && frontier.empty()) {
        if (harvested.empty()) throw UnsolvableError();
        result.certified = true;  // the whole acyclic space was enumerated
    }

    for (const auto& h : harvested) {
        Plan plan;
        plan.cost = h.cost;
        for (int i = h.node; i >= 0; i = arena[static_cast<std::size_t>(i)].parent)
            if (arena[static_cast<std::size_t>(i)].action_id >= 0)
                plan.action_ids.push_back(arena[static_cast<std::size_t>(i)].action_id);
        std::reverse(plan.action_ids.begin(), plan.action_ids.end());
        result.plans.push_back(std::move(plan));
    }
    std::sort(result.plans.begin(), result.plans.end(), [&](const Plan& a, const Plan& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        std::vector<int> ra, rb;
        for (int id : a.action_ids) ra.push_back(name_rank[static_cast<std::size_t>(id)]);
        for (int id : b.action_ids) rb.push_back(name_rank[static_cast<std::size_t>(id)]);
        return ra < rb;
    });
    if (static_cast<int>(result.plans.size()) > k)
        result.plans.resize(static_cast<std::size_t>(k));
    return result;
}

std::string dump_plans(const Task& task, const TopKResult& result) {
    std::ostringstream out;
    for (const auto& plan : result.plans) {
        out << "; cost = " << plan.cost << "\n";
        for (std::size_t i = 0; i < plan.action_ids.size(); ++i) {
            if (i) out << " ";
            out << task.actions[static_cast<std::size_t>(plan.action_ids[i])].name;
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace tamp::topk
