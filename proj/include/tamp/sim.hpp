#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tamp/motion.hpp"
#include "tamp/pddl.hpp"

namespace tamp::sim {

struct SimParams {
    double support_skin = 0.001;      // vertical tolerance for resting contact
    double grasp_standoff = 0.005;    // gripper point above the target's top face
    double gripper_reach = 0.015;     // max distance between gripper and grasp point
    double attach_lift = 0.003;       // object raise on attach, breaks old contact
    double place_clearance = 0.003;   // hover height above the support when releasing
    double release_threshold = 0.005; // settle drop beyond this fails the place
    double max_ee_step = 0.05;        // per-step gripper translation limit while carrying
    int settle_max_iters = 100;
};

// Full world snapshot between actions: object poses, arm configuration, any
// held object, and non-geometric facts produced by appliance actions.
struct WorldState {
    geom::Scene scene;
    robot::Config q{};
    std::optional<motion::Attachment> attachment;
    std::set<std::string> flags;  // ground atom strings, e.g. "(cleaned egg)"
};

struct SettleResult {
    geom::Scene scene;
    double displacement = 0.0;  // largest center translation among settled objects
    std::vector<std::string> collapsed_ids;
};

// Quasi-static gravity: repeatedly drops unsupported movable objects straight
// down onto the highest surface whose top face contains their center of mass.
// Objects with no such surface fall to the workspace floor; objects that land
// on a contact set whose faces all miss the center topple. Both are reported
// as collapsed. Frozen objects (the held one) never move.
SettleResult settle(const geom::Scene& scene, const std::set<std::string>& frozen,
                    const SimParams& params = {});

// Symbolic reading of a world. Geometric predicates (on, on-table, clear,
// holding, arm-empty, at) are derived from poses and the attachment, flag
// predicates from WorldState::flags, and static predicates, those no action
// ever adds or deletes, are copied from the problem's initial state.
pddl::SymbolicState evaluate_predicates(const pddl::Task& task, const WorldState& world,
                                        const SimParams& params = {});

// True iff the world reads back as exactly the given symbolic state.
bool consistent(const pddl::Task& task, const pddl::SymbolicState& s, const WorldState& world,
                const SimParams& params = {});

// Human-readable mismatches between s and the evaluated world, empty when
// consistent. Feeds the planner's backtracking feedback.
std::vector<std::string> consistency_violations(const pddl::Task& task,
                                                const pddl::SymbolicState& s,
                                                const WorldState& world,
                                                const SimParams& params = {});

// The four feedback classes the planner reports to its advisor: the goal
// pose collides, no IK solution, no collision-free trajectory, or the
// execution broke a grasp/release/support constraint.
enum class ViolationCategory { GoalCollision, IkFailure, MotionFailure, ExecutionInconsistency };

enum class ViolationDetail { GraspSlip, ReleaseDisplacement, Collapse, Unsupported, CollisionPair };

const char* to_string(ViolationCategory c);
const char* to_string(ViolationDetail d);

struct Violation {
    ViolationCategory category{};
    std::optional<ViolationDetail> detail;
    std::string message;

    std::string str() const;  // "category[/detail]: message"
};

struct ExecResult {
    bool ok = false;
    WorldState world;           // resulting world; meaningful even on failure
    std::string violation;      // empty when ok
    std::optional<ViolationDetail> detail;  // set for physical failures
    double settle_displacement = 0.0;
};

// Plays a planned trajectory for one ground action against the world:
// pickup/unstack walk then attach, putdown/stack walk then release and
// settle, clean/cook record their flag without moving. Reports gripper
// slips, failed grasps, dropped placements, collapses, and interpenetration
// left after settling.
ExecResult execute(const robot::RobotModel& robot, const pddl::Task& task,
                   const WorldState& world, const pddl::GroundAction& action,
                   const motion::Trajectory& traj, const SimParams& params = {});

}  // namespace tamp::sim
