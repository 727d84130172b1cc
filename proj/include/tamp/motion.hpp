#pragma once

#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "tamp/geom.hpp"
#include "tamp/robot.hpp"

namespace tamp::motion {

// Grasped object: posed at fk(config) * grasp_offset while carried. The box
// itself stays in the scene under its id; collision checks reposition it and
// skip robot-vs-attached pairs.
struct Attachment {
    std::string object_id;
    geom::Pose grasp_offset;
};

struct Trajectory {
    std::vector<robot::Config> waypoints;
    double cspace_length() const;
};

enum class MotionErrorKind { StartInCollision, GoalInCollision, NoPathWithinBudget };

struct MotionError {
    MotionErrorKind kind;
    std::string detail;
    std::optional<geom::IdPair> pair;  // offending pair for the collision kinds
};

struct MotionRequest {
    robot::Config start;
    robot::Config goal;
    geom::Scene scene;  // obstacles; grasp targets are removed by the caller
    std::optional<Attachment> attached;
    double margin = 0.002;
};

using MotionResult = std::variant<Trajectory, MotionError>;

// Joint-space interpolation step between collision checks.
constexpr double kCollisionResolution = 0.02;
// Maximum extension length (L2 in joint space) per RRT step and the waypoint
// spacing after densification. Paths planned with an attachment densify to
// kCollisionResolution per joint instead, keeping the carried object inside
// the simulator's slip limit.
constexpr double kSteerStep = 0.15;

bool config_collides(const robot::RobotModel& m, const robot::Config& c, const geom::Scene& scene,
                     const std::optional<Attachment>& attached, double margin,
                     geom::IdPair* hit = nullptr);

bool edge_collides(const robot::RobotModel& m, const robot::Config& a, const robot::Config& b,
                   const geom::Scene& scene, const std::optional<Attachment>& attached,
                   double margin);

MotionResult plan_rrt_connect(const robot::RobotModel& m, const MotionRequest& req,
                              std::mt19937_64& rng, int max_iters = 5000);

struct CollisionReport {
    double param = 0.0;  // fraction of the waypoint path, 0 at start, 1 at end
    geom::IdPair pair;
};

// First collision along the trajectory at the given interpolation resolution.
std::optional<CollisionReport> validate_trajectory(const robot::RobotModel& m,
                                                   const Trajectory& traj,
                                                   const geom::Scene& scene,
                                                   const std::optional<Attachment>& attached,
                                                   double margin,
                                                   double resolution = kCollisionResolution);

// Random shortcutting followed by re-densification to the steer spacing.
Trajectory shortcut(const robot::RobotModel& m, const Trajectory& traj, const geom::Scene& scene,
                    const std::optional<Attachment>& attached, double margin,
                    std::mt19937_64& rng, int attempts = 60);

}  // namespace tamp::motion
