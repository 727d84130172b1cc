#include "tamp/robot.hpp"

#include <algorithm>
#include <cmath>

namespace tamp::robot {

using geom::Pose;
using geom::Vec3;

double config_distance(const Config& a, const Config& b) {
    double s = 0;
    for (int i = 0; i < 5; ++i) {
        double d = a.q[static_cast<std::size_t>(i)] - b.q[static_cast<std::size_t>(i)];
        s += d * d;
    }
    return std::sqrt(s);
}

double config_max_joint_delta(const Config& a, const Config& b) {
    double s = 0;
    for (int i = 0; i < 5; ++i)
        s = std::max(s, std::abs(a.q[static_cast<std::size_t>(i)] - b.q[static_cast<std::size_t>(i)]));
    return s;
}

Config interpolate(const Config& a, const Config& b, double t) {
    Config out;
    for (int i = 0; i < 5; ++i) {
        auto idx = static_cast<std::size_t>(i);
        out.q[idx] = a.q[idx] + t * (b.q[idx] - a.q[idx]);
    }
    return out;
}

RobotModel RobotModel::standard() { return RobotModel{}; }

std::array<Vec3, 5> joint_positions(const RobotModel& m, const Config& c) {
    const double bearing = m.base_pose.yaw + c.q[0];
    const double cb = std::cos(bearing), sb = std::sin(bearing);
    auto unit = [&](double pitch) {
        return Vec3{std::sin(pitch) * cb, std::sin(pitch) * sb, std::cos(pitch)};
    };
    std::array<Vec3, 5> p;
    p[0] = m.base_pose.position;
    p[1] = p[0] + Vec3{0, 0, m.link_lengths[0]};
    p[2] = p[1] + unit(c.q[1]) * m.link_lengths[1];
    p[3] = p[2] + unit(c.q[1] + c.q[2]) * m.link_lengths[2];
    p[4] = p[3] + unit(c.q[1] + c.q[2] + c.q[3]) * m.link_lengths[3];
    return p;
}

Pose forward_kinematics(const RobotModel& m, const Config& c) {
    auto p = joint_positions(m, c);
    return {p[4], geom::wrap_angle(m.base_pose.yaw + c.q[0] + c.q[4])};
}

std::vector<geom::BoxObject> link_collision_boxes(const RobotModel& m, const Config& c) {
    auto p = joint_positions(m, c);
    std::vector<geom::BoxObject> out;
    const double h = m.link_half_width;

    auto chain = [&](Vec3 a, Vec3 b, const std::string& link) {
        Vec3 d = b - a;
        double len = d.norm();
        int n = std::max(1, static_cast<int>(std::ceil(len / (2.0 * h))));
        for (int i = 0; i < n; ++i) {
            geom::BoxObject box;
            box.id = "__robot_" + link + "_" + std::to_string(i);
            box.half_extents = {h, h, h};
            box.pose.position = a + d * ((i + 0.5) / n);
            box.color = {70, 70, 80};
            out.push_back(std::move(box));
        }
    };

    // The column starts a hair above the mount so it never trades contact
    // with the table surface for a margin violation.
    chain(p[0] + Vec3{0, 0, 0.01}, p[1], "column");
    chain(p[1], p[2], "upper");
    chain(p[2], p[3], "fore");
    chain(p[3], p[4], "wrist");

    geom::BoxObject ee;
    ee.id = "__robot_ee";
    ee.half_extents = {h, h, h};
    ee.pose.position = p[4];
    ee.pose.yaw = geom::wrap_angle(m.base_pose.yaw + c.q[0] + c.q[4]);
    ee.color = {40, 40, 50};
    out.push_back(std::move(ee));
    return out;
}

bool within_limits(const RobotModel& m, const Config& c) {
    for (int i = 0; i < 5; ++i) {
        auto idx = static_cast<std::size_t>(i);
        if (c.q[idx] < m.joint_limits[idx].first || c.q[idx] > m.joint_limits[idx].second)
            return false;
    }
    return true;
}

Config clamp_to_limits(const RobotModel& m, const Config& c) {
    Config out = c;
    for (int i = 0; i < 5; ++i) {
        auto idx = static_cast<std::size_t>(i);
        out.q[idx] = std::clamp(out.q[idx], m.joint_limits[idx].first, m.joint_limits[idx].second);
    }
    return out;
}

double fk_lipschitz_bound(const RobotModel& m) {
    const double reach = m.link_lengths[1] + m.link_lengths[2] + m.link_lengths[3];
    // q0 and q1 swing the whole arm, q2 the last two links, q3 the wrist.
    return reach + reach + (m.link_lengths[2] + m.link_lengths[3]) + m.link_lengths[3];
}

namespace {

// Residual target - fk, yaw wrapped.
std::array<double, 4> residual(const RobotModel& m, const Config& c, const Pose& target) {
    Pose fk = forward_kinematics(m, c);
    return {target.position.x - fk.position.x, target.position.y - fk.position.y,
            target.position.z - fk.position.z, geom::wrap_angle(target.yaw - fk.yaw)};
}

bool converged(const std::array<double, 4>& r, const IkOptions& opts) {
    double pos = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    return pos <= opts.pos_tol && std::abs(r[3]) <= opts.yaw_tol;
}

// Solves the damped normal equations (J J^T + d^2 I) y = r in place.
bool solve4(std::array<std::array<double, 4>, 4> a, std::array<double, 4>& y) {
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 4; ++row)
            if (std::abs(a[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)]) >
                std::abs(a[static_cast<std::size_t>(pivot)][static_cast<std::size_t>(col)]))
                pivot = row;
        std::swap(a[static_cast<std::size_t>(col)], a[static_cast<std::size_t>(pivot)]);
        std::swap(y[static_cast<std::size_t>(col)], y[static_cast<std::size_t>(pivot)]);
        double diag = a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
        if (std::abs(diag) < 1e-12) return false;
        for (int row = col + 1; row < 4; ++row) {
            double f = a[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] / diag;
            for (int k = col; k < 4; ++k)
                a[static_cast<std::size_t>(row)][static_cast<std::size_t>(k)] -=
                    f * a[static_cast<std::size_t>(col)][static_cast<std::size_t>(k)];
            y[static_cast<std::size_t>(row)] -= f * y[static_cast<std::size_t>(col)];
        }
    }
    for (int col = 3; col >= 0; --col) {
        for (int k = col + 1; k < 4; ++k)
            y[static_cast<std::size_t>(col)] -=
                a[static_cast<std::size_t>(col)][static_cast<std::size_t>(k)] * y[static_cast<std::size_t>(k)];
        y[static_cast<std::size_t>(col)] /= a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
    }
    return true;
}

std::optional<Config> ik_from_seed(const RobotModel& m, const Pose& target, Config c,
                                   const IkOptions& opts) {
    c = clamp_to_limits(m, c);
    for (int iter = 0; iter < opts.max_iters; ++iter) {
        auto r = residual(m, c, target);
        if (converged(r, opts)) return c;

        // Numeric Jacobian, central differences.
        std::array<std::array<double, 4>, 5> jt;  // rows = joints, cols = residual dims
        const double eps = 1e-5;
        for (int j = 0; j < 5; ++j) {
            Config hi = c, lo = c;
            hi.q[static_cast<std::size_t>(j)] += eps;
            lo.q[static_cast<std::size_t>(j)] -= eps;
            Pose fh = forward_kinematics(m, hi);
            Pose fl = forward_kinematics(m, lo);
            jt[static_cast<std::size_t>(j)] = {
                (fh.position.x - fl.position.x) / (2 * eps),
                (fh.position.y - fl.position.y) / (2 * eps),
                (fh.position.z - fl.position.z) / (2 * eps),
                geom::wrap_angle(fh.yaw - fl.yaw) / (2 * eps)};
        }

        // JJ^T (4x4) with damping.
        std::array<std::array<double, 4>, 4> jjt{};
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                double s = 0;
                for (int j = 0; j < 5; ++j)
                    s += jt[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)] *
                         jt[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)];
                jjt[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                    s + (a == b ? opts.damping * opts.damping : 0.0);
            }
        std::array<double, 4> y = r;
        if (!solve4(jjt, y)) return std::nullopt;

        double max_step = 0;
        Config next = c;
        for (int j = 0; j < 5; ++j) {
            double dq = 0;
            for (int a = 0; a < 4; ++a)
                dq += jt[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)] *
                      y[static_cast<std::size_t>(a)];
            max_step = std::max(max_step, std::abs(dq));
            next.q[static_cast<std::size_t>(j)] += dq;
        }
        if (max_step > 0.5) {
            double scale = 0.5 / max_step;
            for (int j = 0; j < 5; ++j)
                next.q[static_cast<std::size_t>(j)] =
                    c.q[static_cast<std::size_t>(j)] +
                    scale * (next.q[static_cast<std::size_t>(j)] - c.q[static_cast<std::size_t>(j)]);
        }
        next = clamp_to_limits(m, next);
        if (config_distance(next, c) < 1e-10) break;  // stuck on a limit
        c = next;
    }
    auto r = residual(m, c, target);
    if (converged(r, opts)) return c;
    return std::nullopt;
}

}  // namespace

std::optional<Config> inverse_kinematics(const RobotModel& m, const geom::Pose& target,
                                         const Config& seed, std::mt19937_64& rng,
                                         const IkOptions& opts) {
    if (!target.position.finite()) return std::nullopt;
    if (auto hit = ik_from_seed(m, target, seed, opts)) return hit;
    for (int attempt = 0; attempt < opts.restarts; ++attempt) {
        Config c;
        for (int j = 0; j < 5; ++j) {
            auto idx = static_cast<std::size_t>(j);
            std::uniform_real_distribution<double> dist(m.joint_limits[idx].first,
                                                        m.joint_limits[idx].second);
            c.q[idx] = dist(rng);
        }
        if (auto hit = ik_from_seed(m, target, c, opts)) return hit;
    }
    return std::nullopt;
}

}  // namespace tamp::robot
