#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tamp/motion.hpp"

using namespace tamp::motion;
using namespace tamp::robot;
using tamp::geom::BoxObject;
using tamp::geom::Pose;
using tamp::geom::Scene;
using tamp::geom::Vec3;

namespace {

RobotModel arm() {
    RobotModel m = RobotModel::standard();
    m.base_pose = {{0.0, -0.26, 0.0}, M_PI / 2};
    return m;
}

Scene table_scene() {
    Scene s;
    BoxObject table;
    table.id = "table";
    table.half_extents = {0.3, 0.3, 0.02};
    table.pose.position = {0, 0, -0.02};
    table.fixed = true;
    s.objects["table"] = table;
    s.regions.push_back({"table", "table"});
    return s;
}

// Two wall segments across the table at y ~ 0.08 leaving a 10 cm doorway in
// the middle.
Scene gap_scene() {
    Scene s = table_scene();
    for (int side : {-1, 1}) {
        BoxObject wall;
        wall.id = side < 0 ? "wall_left" : "wall_right";
        wall.half_extents = {0.10, 0.01, 0.10};
        wall.pose.position = {side * 0.15, 0.08, 0.10};
        wall.fixed = true;
        s.objects[wall.id] = wall;
    }
    return s;
}

Config ik_or_die(const RobotModel& m, const Pose& target, std::mt19937_64& rng) {
    auto hit = inverse_kinematics(m, target, m.ready, rng);
    REQUIRE(hit.has_value());
    return *hit;
}

}  // namespace

TEST_CASE("empty scene connects near the straight line") {
    RobotModel m = arm();
    Scene s;  // nothing to hit
    std::mt19937_64 rng(21);

    MotionRequest req;
    req.start = m.ready;
    req.goal = Config{{0.8, 0.9, 0.4, -0.3, 0.5}};
    req.scene = s;

    auto res = plan_rrt_connect(m, req, rng);
    REQUIRE(std::holds_alternative<Trajectory>(res));
    const auto& traj = std::get<Trajectory>(res);
    REQUIRE(traj.waypoints.size() >= 2);
    CHECK(traj.waypoints.front().q == req.start.q);
    CHECK(traj.waypoints.back().q == req.goal.q);
    double direct = config_distance(req.start, req.goal);
    CHECK(traj.cspace_length() <= 2.0 * direct);
    for (std::size_t i = 1; i < traj.waypoints.size(); ++i)
        CHECK(config_distance(traj.waypoints[i - 1], traj.waypoints[i]) <= kSteerStep + 1e-9);
}

TEST_CASE("identical start and goal short-circuit") {
    RobotModel m = arm();
    MotionRequest req;
    req.start = req.goal = m.ready;
    req.scene = table_scene();
    std::mt19937_64 rng(22);
    auto res = plan_rrt_connect(m, req, rng);
    REQUIRE(std::holds_alternative<Trajectory>(res));
    CHECK(std::get<Trajectory>(res).waypoints.size() == 2);
}

TEST_CASE("colliding endpoints are classified with the offending pair") {
    RobotModel m = arm();
    Config dipped{{0.0, 2.4, 0.0, 0.0, 0.0}};  // forearm sweeps below the tabletop
    REQUIRE(config_collides(m, dipped, table_scene(), std::nullopt, 0.002));

    MotionRequest req;
    req.scene = table_scene();
    req.start = dipped;
    req.goal = m.ready;
    std::mt19937_64 rng(23);
    auto res = plan_rrt_connect(m, req, rng);
    REQUIRE(std::holds_alternative<MotionError>(res));
    auto err = std::get<MotionError>(res);
    CHECK(err.kind == MotionErrorKind::StartInCollision);
    REQUIRE(err.pair.has_value());
    CHECK(err.pair->second == "table");

    std::swap(req.start, req.goal);
    auto res2 = plan_rrt_connect(m, req, rng);
    REQUIRE(std::holds_alternative<MotionError>(res2));
    CHECK(std::get<MotionError>(res2).kind == MotionErrorKind::GoalInCollision);
}

TEST_CASE("doorway scene solves on nearly every seed") {
    RobotModel m = arm();
    Scene s = gap_scene();
    std::mt19937_64 setup_rng(24);
    Config start = ik_or_die(m, {{0.0, -0.05, 0.10}, 0.0}, setup_rng);
    Config goal = ik_or_die(m, {{0.1, 0.20, 0.05}, 0.0}, setup_rng);
    REQUIRE_FALSE(config_collides(m, start, s, std::nullopt, 0.002));
    REQUIRE_FALSE(config_collides(m, goal, s, std::nullopt, 0.002));

    int solved = 0;
    const int seeds = 100;
    for (int seed = 0; seed < seeds; ++seed) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(seed) + 1000);
        MotionRequest req{start, goal, s, std::nullopt, 0.002};
        auto res = plan_rrt_connect(m, req, rng);
        if (!std::holds_alternative<Trajectory>(res)) continue;
        const auto& traj = std::get<Trajectory>(res);
        // A solution must actually be collision free end to end.
        if (!validate_trajectory(m, traj, s, std::nullopt, 0.002)) ++solved;
    }
    CHECK(solved >= 95);
}

TEST_CASE("validation agrees with a ten-times-finer sweep") {
    RobotModel m = arm();
    Scene s = table_scene();
    std::mt19937_64 rng(25);
    Config a = ik_or_die(m, {{-0.1, 0.05, 0.20}, 0.0}, rng);
    Config b = ik_or_die(m, {{0.15, 0.10, 0.22}, 0.0}, rng);

    MotionRequest req{a, b, s, std::nullopt, 0.002};
    auto res = plan_rrt_connect(m, req, rng);
    REQUIRE(std::holds_alternative<Trajectory>(res));
    Trajectory traj = std::get<Trajectory>(res);
    CHECK_FALSE(validate_trajectory(m, traj, s, std::nullopt, 0.002).has_value());
    CHECK_FALSE(validate_trajectory(m, traj, s, std::nullopt, 0.002, 0.002).has_value());

    // Drive a waypoint through the tabletop and both sweeps must object.
    Trajectory bad = traj;
    std::size_t mid = bad.waypoints.size() / 2;
    bad.waypoints.insert(bad.waypoints.begin() + static_cast<long>(mid),
                         Config{{0.0, 2.4, 0.0, 0.0, 0.0}});
    auto coarse = validate_trajectory(m, bad, s, std::nullopt, 0.002);
    auto fine = validate_trajectory(m, bad, s, std::nullopt, 0.002, 0.002);
    REQUIRE(coarse.has_value());
    REQUIRE(fine.has_value());
    CHECK(fine->param <= coarse->param + 1e-9);
    CHECK(coarse->param - fine->param < 0.05);
    CHECK(coarse->pair.second == "table");
    CHECK(fine->pair.second == "table");
}

TEST_CASE("shortcut keeps endpoints, validity, and never lengthens") {
    RobotModel m = arm();
    Scene s = gap_scene();
    std::mt19937_64 rng(26);
    Config start = ik_or_die(m, {{-0.05, -0.03, 0.12}, 0.0}, rng);
    Config goal = ik_or_die(m, {{0.05, 0.18, 0.08}, 0.0}, rng);
    MotionRequest req{start, goal, s, std::nullopt, 0.002};
    auto res = plan_rrt_connect(m, req, rng, 5000);
    REQUIRE(std::holds_alternative<Trajectory>(res));
    Trajectory traj = std::get<Trajectory>(res);

    Trajectory cut = shortcut(m, traj, s, std::nullopt, 0.002, rng, 120);
    CHECK(cut.waypoints.front().q == traj.waypoints.front().q);
    CHECK(cut.waypoints.back().q == traj.waypoints.back().q);
    CHECK(cut.cspace_length() <= traj.cspace_length() + 1e-9);
    CHECK_FALSE(validate_trajectory(m, cut, s, std::nullopt, 0.002).has_value());
    for (std::size_t i = 1; i < cut.waypoints.size(); ++i)
        CHECK(config_distance(cut.waypoints[i - 1], cut.waypoints[i]) <= kSteerStep + 1e-9);
}

TEST_CASE("carried object participates in collision checks") {
    RobotModel m = arm();
    Scene s = gap_scene();
    BoxObject cargo;
    cargo.id = "cargo";
    cargo.half_extents = {0.02, 0.02, 0.02};
    cargo.pose.position = {0, -0.05, 0.02};
    s.objects["cargo"] = cargo;

    Attachment att{"cargo", Pose{{0, 0, -0.025}, 0.0}};
    std::mt19937_64 rng(27);
    Config start = ik_or_die(m, {{0.0, -0.05, 0.12}, 0.0}, rng);
    Config goal = ik_or_die(m, {{0.0, 0.20, 0.12}, 0.0}, rng);

    MotionRequest req{start, goal, s, att, 0.002};
    auto res = plan_rrt_connect(m, req, rng);
    REQUIRE(std::holds_alternative<Trajectory>(res));
    Trajectory traj = std::get<Trajectory>(res);
    CHECK_FALSE(validate_trajectory(m, traj, s, att, 0.002).has_value());

    // A straight-line sweep pushes the cargo through a wall segment; the
    // validator must blame a collision (cargo or arm against a wall).
    Config through = ik_or_die(m, {{-0.15, 0.20, 0.05}, 0.0}, rng);
    Trajectory naive{{start, through}};
    auto report = validate_trajectory(m, naive, s, att, 0.002);
    REQUIRE(report.has_value());
    bool wall_hit = report->pair.first.find("wall") != std::string::npos ||
                    report->pair.second.find("wall") != std::string::npos;
    CHECK(wall_hit);
}

TEST_CASE("planning is deterministic for a fixed seed") {
    RobotModel m = arm();
    Scene s = gap_scene();
    std::mt19937_64 setup(28);
    Config start = ik_or_die(m, {{0.0, -0.05, 0.10}, 0.0}, setup);
    Config goal = ik_or_die(m, {{0.1, 0.20, 0.05}, 0.0}, setup);
    MotionRequest req{start, goal, s, std::nullopt, 0.002};

    std::mt19937_64 rng1(99), rng2(99);
    auto r1 = plan_rrt_connect(m, req, rng1);
    auto r2 = plan_rrt_connect(m, req, rng2);
    REQUIRE(std::holds_alternative<Trajectory>(r1));
    REQUIRE(std::holds_alternative<Trajectory>(r2));
    const auto& w1 = std::get<Trajectory>(r1).waypoints;
    const auto& w2 = std::get<Trajectory>(r2).waypoints;
    REQUIRE(w1.size() == w2.size());
    for (std::size_t i = 0; i < w1.size(); ++i) CHECK(w1[i].q == w2[i].q);
}
