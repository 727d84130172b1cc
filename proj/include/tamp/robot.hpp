#pragma once

#include <array>
#include <optional>
#include <random>
#include <vector>

#include "tamp/geom.hpp"

namespace tamp::robot {

struct Config {
    std::array<double, 5> q{0, 0, 0, 0, 0};
    auto operator<=>(const Config&) const = default;
};

double config_distance(const Config& a, const Config& b);          // L2 over joints
double config_max_joint_delta(const Config& a, const Config& b);   // L-inf
Config interpolate(const Config& a, const Config& b, double t);

// Five-joint serial arm: yaw at the base column, three pitch joints, wrist
// yaw. Pitch angles are measured from vertical, so the all-zero config points
// straight up.
struct RobotModel {
    geom::Pose base_pose;
    std::array<double, 4> link_lengths{0.25, 0.35, 0.35, 0.12};  // column, upper, fore, wrist
    std::array<std::pair<double, double>, 5> joint_limits{{
        {-M_PI, M_PI},
        {-2.4, 2.4},
        {-2.7, 2.7},
        {-2.7, 2.7},
        {-M_PI, M_PI},
    }};
    double link_half_width = 0.015;
    double gripper_reach = 0.015;
    Config ready{{0.0, 0.4, 0.5, 0.0, 0.0}};

    static RobotModel standard();
};

// End-effector pose; yaw = base yaw + q0 + q4.
geom::Pose forward_kinematics(const RobotModel& m, const Config& c);

// Chain points base, shoulder, elbow, wrist, end effector.
std::array<geom::Vec3, 5> joint_positions(const RobotModel& m, const Config& c);

// Cube chain along each link for collision checking. Cubes abut so the chain
// covers the segments without gaps; ids carry a "__robot" prefix.
std::vector<geom::BoxObject> link_collision_boxes(const RobotModel& m, const Config& c);

bool within_limits(const RobotModel& m, const Config& c);
Config clamp_to_limits(const RobotModel& m, const Config& c);

// Sum of per-joint workspace levers; |fk(a)-fk(b)| <= bound * |a-b|_1.
double fk_lipschitz_bound(const RobotModel& m);

struct IkOptions {
    int max_iters = 200;
    double damping = 0.05;
    int restarts = 8;
    double pos_tol = 0.001;   // meters
    double yaw_tol = 0.01;    // radians
};

// Damped least squares on the 4-D residual (position + wrapped yaw). Returns
// an in-limit config verified against the tolerances, or nullopt.
std::optional<Config> inverse_kinematics(const RobotModel& m, const geom::Pose& target,
                                         const Config& seed, std::mt19937_64& rng,
                                         const IkOptions& opts = {});

}  // namespace tamp::robot
