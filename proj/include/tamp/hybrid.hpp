#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "tamp/advisor.hpp"
#include "tamp/dgraph.hpp"
#include "tamp/motion.hpp"
#include "tamp/pddl.hpp"
#include "tamp/robot.hpp"
#include "tamp/sim.hpp"
#include "tamp/topk.hpp"

namespace tamp::hybrid {

// Time source for the planning loop. The stepped clock advances a fixed
// amount per query, so two runs with identical inputs report identical
// planning times and produce byte-identical output files.
struct Clock {
    virtual ~Clock() = default;
    virtual double now() = 0;  // seconds, monotone
};

class WallClock : public Clock {
  public:
    double now() override;
};

class SteppedClock : public Clock {
  public:
    explicit SteppedClock(double tick = 0.001) : tick_(tick) {}
    double now() override { return t_ += tick_; }

  private:
    double t_ = 0.0, tick_;
};

struct PlannerConfig {
    int k = 30;                      // symbolic plans fused into the graph
    int retries = 5;                 // expansion re-attempts before backtracking
    double timeout_s = 600.0;
    std::uint64_t seed = 0;
    int rrt_max_iters = 5000;
    int samples_per_action = 10;     // placement draws per refinement
    int ik_attempts = 10;            // restarts before a goal counts unreachable
    long long node_budget = 200000;  // top-k generated-node cap
    int root_sample_budget = 100;    // full-scene draws for the initial world
    double margin = 0.002;           // motion-planning clearance
    int image_size = 192;            // advisor image resolution
};

// Gripper height above the target's top face for grasps. High enough that
// the end-effector collision cube (15 mm half width) clears the target and
// freshly placed objects at the planning margin even with the worst-case
// 1 mm IK error, low enough to stay within grasping reach of the standoff
// point 5 mm over the face.
constexpr double kGraspAbove = 0.0185;
// Gap under a released object: clears the support at the planning margin,
// and the settle drop stays under the release threshold.
constexpr double kPlaceHover = 0.0035;

// A grounded action refined with continuous parameters: the sampled gripper
// goal, the arm configurations it connects, and the planned trajectory.
struct ActionBinding {
    int action_id = -1;
    std::string action;  // ground action name
    geom::Pose ee_goal;
    robot::Config start_config;
    robot::Config goal_config;
    motion::Trajectory trajectory;
};

enum class NodeStatus { Open, Expanded, Exhausted };
const char* status_name(NodeStatus s);

// A refinement or execution failure recorded at the node that attempted it.
struct FailureNote {
    std::string action;
    sim::Violation violation;
};

struct HybridNode {
    int id = -1;
    int parent = -1;
    int depth = 0;
    int retry_count = 0;
    NodeStatus status = NodeStatus::Open;
    pddl::SymbolicState symbolic;
    sim::WorldState world;
    std::optional<ActionBinding> incoming;
    double displacement = 0.0;  // settle displacement while executing incoming
    std::vector<int> children;
    std::vector<int> child_actions;     // action ids already realized as children
    std::vector<FailureNote> failures;  // deduplicated by (action, category, detail)
};

struct HybridTree {
    std::vector<HybridNode> nodes;  // id equals index
    int root = 0;
};

// Tree snapshot fed to advisors and dumped as tree.json: every node with its
// status, symbolic atoms, movable-object poses and arm configuration; every
// realized edge plus one infeasible edge per recorded failure.
std::string tree_to_json(const HybridTree& tree, const pddl::Task& task);

struct PlanInputs {
    pddl::Task task;
    geom::Scene scene;  // template; movable poses may be placeholders
    robot::RobotModel robot = robot::RobotModel::standard();
    std::optional<sim::WorldState> root_world;  // skips sampling when given
    sim::SimParams sim;
};

struct PlanResult {
    bool success = false;
    std::string failure;  // "timeout", "exhausted", "unsolvable", "no-consistent-root"
    std::vector<ActionBinding> plan;
    int goal_node = -1;
    double planning_time = 0.0;
    int expansions = 0;  // refinement rounds, retries included
    int backtracks = 0;  // advisor backtrack queries
    int retries = 0;     // re-expansions after an all-failed round
    HybridTree tree;
    sim::WorldState root_world, final_world;
    topk::TopKResult topk;
    dgraph::DiscreteStateGraph graph;
    std::vector<std::string> advisor_log;  // one JSON object per advisor decision
};

// Samples a gripper goal for one action: a yawed top grasp for pickup and
// unstack, a placement for putdown and stack drawn on the support named by
// the action (its pad for sink and stove, the table for bodiless regions),
// rejecting placements where the object would collide at zero margin.
// Returns nullopt when no draw survives the budget.
std::optional<geom::Pose> sample_ee_goal(const robot::RobotModel& robot, const pddl::Task& task,
                                         const pddl::GroundAction& action,
                                         const sim::WorldState& world,
                                         const sim::SimParams& sim, int samples,
                                         std::mt19937_64& rng);

// Chains goal sampling, inverse kinematics, and RRT-Connect. Appliance
// actions (clean, cook) bind trivially to a zero-length trajectory. Failures
// come back as classified violations instead of errors.
std::variant<ActionBinding, sim::Violation> refine_action(
    const robot::RobotModel& robot, const pddl::Task& task, const sim::WorldState& world,
    const pddl::GroundAction& action, const PlannerConfig& cfg, const sim::SimParams& sim,
    std::mt19937_64& rng);

// Draws object placements satisfying the task's initial atoms, settles, and
// verifies consistency; the template's own poses are tried first so curated
// scenes pass through unchanged. Throws std::runtime_error when no
// consistent sample is found within the budget (or the support relation in
// the initial state is cyclic).
sim::WorldState sample_root_world(const pddl::Task& task, const geom::Scene& scene,
                                  const robot::RobotModel& robot, const sim::SimParams& sim,
                                  int budget, std::mt19937_64& rng);

// Full pipeline: top-k plans, discrete graph, root world, then the
// expand/retry/backtrack loop until a consistent node satisfies the goal or
// the timeout passes. Uses a wall clock when none is given.
PlanResult plan(const PlanInputs& in, const PlannerConfig& cfg, advisor::Advisor& adv,
                Clock* clock = nullptr);

// Self-contained replayable record: domain and problem text, sim parameters,
// robot base, the root world, and every binding's waypoints.
void write_plan_file(const std::string& path, const PlanInputs& in, const PlannerConfig& cfg,
                     const PlanResult& res);

// plan.json (on success), tree.json, graph.dot, sas_plans.txt,
// advisor_log.jsonl, and root/final renders under <dir>/images.
void write_run_outputs(const std::string& dir, const PlanInputs& in, const PlannerConfig& cfg,
                       const PlanResult& res);

struct ReplayResult {
    bool ok = false;
    std::string error;
    int steps = 0;  // actions executed without violation
    bool goal_satisfied = false;
    sim::WorldState final_world;
};

// Re-executes a plan file through the simulator from its stored root world
// and re-checks the goal atoms on the final world.
ReplayResult replay_plan_file(const std::string& path);

// Scene serialization in the same shape plan files embed. from_json throws
// std::runtime_error on malformed input.
std::string scene_to_json(const geom::Scene& scene);
geom::Scene scene_from_json(const std::string& text);

}  // namespace tamp::hybrid
