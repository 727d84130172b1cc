#include "tamp/motion.hpp"

#include <algorithm>
#include <cmath>

namespace tamp::motion {

using robot::Config;
using robot::RobotModel;

double Trajectory::cspace_length() const {
    double len = 0;
    for (std::size_t i = 1; i < waypoints.size(); ++i)
        len += robot::config_distance(waypoints[i - 1], waypoints[i]);
    return len;
}

bool config_collides(const RobotModel& m, const Config& c, const geom::Scene& scene,
                     const std::optional<Attachment>& attached, double margin,
                     geom::IdPair* hit) {
    auto links = robot::link_collision_boxes(m, c);
    for (const auto& rb : links) {
        for (const auto& [id, obj] : scene.objects) {
            if (attached && id == attached->object_id) continue;
            if (geom::box_box_collide(rb, obj, margin)) {
                if (hit) *hit = geom::ordered_pair(rb.id, id);
                return true;
            }
        }
    }
    if (attached) {
        const geom::BoxObject* carried = scene.find(attached->object_id);
        if (carried) {
            geom::BoxObject posed = *carried;
            posed.pose = forward_kinematics(m, c).compose(attached->grasp_offset);
            for (const auto& [id, obj] : scene.objects) {
                if (id == attached->object_id) continue;
                if (geom::box_box_collide(posed, obj, margin)) {
                    if (hit) *hit = geom::ordered_pair(posed.id, id);
                    return true;
                }
            }
        }
    }
    return false;
}

bool edge_collides(const RobotModel& m, const Config& a, const Config& b,
                   const geom::Scene& scene, const std::optional<Attachment>& attached,
                   double margin) {
    double span = robot::config_max_joint_delta(a, b);
    int n = std::max(1, static_cast<int>(std::ceil(span / kCollisionResolution)));
    for (int i = 1; i <= n; ++i) {
        Config c = robot::interpolate(a, b, static_cast<double>(i) / n);
        if (config_collides(m, c, scene, attached, margin)) return true;
    }
    return false;
}

namespace {

Config steer(const Config& from, const Config& to, double step) {
    double d = robot::config_distance(from, to);
    if (d <= step) return to;
    return robot::interpolate(from, to, step / d);
}

struct TreeNode {
    Config q;
    int parent;
};

int nearest(const std::vector<TreeNode>& tree, const Config& q) {
    int best = 0;
    double best_d = robot::config_distance(tree[0].q, q);
    for (std::size_t i = 1; i < tree.size(); ++i) {
        double d = robot::config_distance(tree[i].q, q);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

std::vector<Config> chain_to_root(const std::vector<TreeNode>& tree, int leaf) {
    std::vector<Config> out;
    for (int i = leaf; i >= 0; i = tree[static_cast<std::size_t>(i)].parent)
        out.push_back(tree[static_cast<std::size_t>(i)].q);
    return out;  // leaf first, root last
}

// Carried paths are emitted at controller resolution: with every joint moving
// at most kCollisionResolution per step the gripper translates well under the
// simulator's slip limit, so a freshly planned carry never slips.
Trajectory densify(const std::vector<Config>& pts, bool carrying) {
    Trajectory out;
    if (pts.empty()) return out;
    out.waypoints.push_back(pts[0]);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        double d = robot::config_distance(pts[i - 1], pts[i]);
        int n = std::max(1, static_cast<int>(std::ceil(d / kSteerStep)));
        if (carrying) {
            double dj = robot::config_max_joint_delta(pts[i - 1], pts[i]);
            n = std::max(n, static_cast<int>(std::ceil(dj / kCollisionResolution)));
        }
        for (int k = 1; k <= n; ++k)
            out.waypoints.push_back(robot::interpolate(pts[i - 1], pts[i], static_cast<double>(k) / n));
    }
    return out;
}

}  // namespace

MotionResult plan_rrt_connect(const RobotModel& m, const MotionRequest& req,
                              std::mt19937_64& rng, int max_iters) {
    geom::IdPair hit;
    if (config_collides(m, req.start, req.scene, req.attached, req.margin, &hit))
        return MotionError{MotionErrorKind::StartInCollision,
                           "start configuration collides: " + hit.first + " vs " + hit.second,
                           hit};
    if (config_collides(m, req.goal, req.scene, req.attached, req.margin, &hit))
        return MotionError{MotionErrorKind::GoalInCollision,
                           "goal configuration collides: " + hit.first + " vs " + hit.second, hit};

    if (robot::config_distance(req.start, req.goal) < 1e-12)
        return Trajectory{{req.start, req.goal}};

    std::vector<TreeNode> start_tree{{req.start, -1}};
    std::vector<TreeNode> goal_tree{{req.goal, -1}};
    std::vector<TreeNode>* ta = &start_tree;
    std::vector<TreeNode>* tb = &goal_tree;

    auto sample = [&]() {
        Config c;
        for (int j = 0; j < 5; ++j) {
            auto idx = static_cast<std::size_t>(j);
            std::uniform_real_distribution<double> d(m.joint_limits[idx].first,
                                                     m.joint_limits[idx].second);
            c.q[idx] = d(rng);
        }
        return c;
    };

    for (int iter = 0; iter < max_iters; ++iter) {
        Config q_rand = sample();
        int i_near = nearest(*ta, q_rand);
        Config q_new = steer((*ta)[static_cast<std::size_t>(i_near)].q, q_rand, kSteerStep);
        if (!edge_collides(m, (*ta)[static_cast<std::size_t>(i_near)].q, q_new, req.scene,
                           req.attached, req.margin)) {
            ta->push_back({q_new, i_near});

            // Greedy connect from the other tree.
            int j = nearest(*tb, q_new);
            Config cur = (*tb)[static_cast<std::size_t>(j)].q;
            int parent = j;
            while (true) {
                Config step_cfg = steer(cur, q_new, kSteerStep);
                if (edge_collides(m, cur, step_cfg, req.scene, req.attached, req.margin)) break;
                tb->push_back({step_cfg, parent});
                parent = static_cast<int>(tb->size()) - 1;
                cur = step_cfg;
                if (robot::config_distance(cur, q_new) < 1e-12) {
                    auto a_chain = chain_to_root(*ta, static_cast<int>(ta->size()) - 1);
                    auto b_chain = chain_to_root(*tb, parent);
                    std::reverse(a_chain.begin(), a_chain.end());  // root .. q_new
                    // b_chain: q_new .. root; drop its duplicate q_new head.
                    std::vector<Config> pts = a_chain;
                    pts.insert(pts.end(), b_chain.begin() + 1, b_chain.end());
                    if (ta != &start_tree) std::reverse(pts.begin(), pts.end());
                    Trajectory rough = densify(pts, req.attached.has_value());
                    return shortcut(m, rough, req.scene, req.attached, req.margin, rng);
                }
            }
        }
        std::swap(ta, tb);
    }
    return MotionError{MotionErrorKind::NoPathWithinBudget,
                       "no path found in " + std::to_string(max_iters) + " iterations",
                       std::nullopt};
}

std::optional<CollisionReport> validate_trajectory(const RobotModel& m, const Trajectory& traj,
                                                   const geom::Scene& scene,
                                                   const std::optional<Attachment>& attached,
                                                   double margin, double resolution) {
    const auto& wp = traj.waypoints;
    if (wp.empty()) return std::nullopt;
    geom::IdPair hit;
    if (config_collides(m, wp[0], scene, attached, margin, &hit)) return CollisionReport{0.0, hit};
    const double denom = static_cast<double>(wp.size() - 1);
    for (std::size_t i = 1; i < wp.size(); ++i) {
        double span = robot::config_max_joint_delta(wp[i - 1], wp[i]);
        int n = std::max(1, static_cast<int>(std::ceil(span / resolution)));
        for (int k = 1; k <= n; ++k) {
            double t = static_cast<double>(k) / n;
            Config c = robot::interpolate(wp[i - 1], wp[i], t);
            if (config_collides(m, c, scene, attached, margin, &hit))
                return CollisionReport{(static_cast<double>(i - 1) + t) / denom, hit};
        }
    }
    return std::nullopt;
}

Trajectory shortcut(const RobotModel& m, const Trajectory& traj, const geom::Scene& scene,
                    const std::optional<Attachment>& attached, double margin,
                    std::mt19937_64& rng, int attempts) {
    std::vector<Config> pts = traj.waypoints;
    for (int a = 0; a < attempts && pts.size() > 2; ++a) {
        std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
        std::size_t i = pick(rng), j = pick(rng);
        if (i > j) std::swap(i, j);
        if (j <= i + 1) continue;
        if (!edge_collides(m, pts[i], pts[j], scene, attached, margin))
            pts.erase(pts.begin() + static_cast<long>(i) + 1, pts.begin() + static_cast<long>(j));
    }
    return densify(pts, attached.has_value());
}

}  // namespace tamp::motion
