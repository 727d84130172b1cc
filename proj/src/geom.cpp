#include "tamp/geom.hpp"

#include <algorithm>
#include <array>

namespace tamp::geom {

// Penetrations below this count as touching, not colliding. Keeps exact face
// contact stable against last-ulp rounding; far below any physical tolerance.
constexpr double kContactEps = 1e-9;

bool Vec3::finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    if (a > M_PI) a -= 2.0 * M_PI;
    return a;
}

Vec3 Pose::apply(const Vec3& local) const {
    const double c = std::cos(yaw), s = std::sin(yaw);
    return {position.x + c * local.x - s * local.y, position.y + s * local.x + c * local.y,
            position.z + local.z};
}

Pose Pose::compose(const Pose& local) const {
    return {apply(local.position), wrap_angle(yaw + local.yaw)};
}

Pose Pose::inverse() const {
    const double c = std::cos(yaw), s = std::sin(yaw);
    return {{-(c * position.x + s * position.y), -(-s * position.x + c * position.y), -position.z},
            wrap_angle(-yaw)};
}

Aabb box_aabb(const BoxObject& b, double inflate) {
    const double c = std::abs(std::cos(b.pose.yaw)), s = std::abs(std::sin(b.pose.yaw));
    const double hx = c * b.half_extents.x + s * b.half_extents.y + inflate;
    const double hy = s * b.half_extents.x + c * b.half_extents.y + inflate;
    const double hz = b.half_extents.z + inflate;
    const Vec3& p = b.pose.position;
    return {{p.x - hx, p.y - hy, p.z - hz}, {p.x + hx, p.y + hy, p.z + hz}};
}

const BoxObject* Scene::find(const std::string& id) const {
    auto it = objects.find(id);
    return it == objects.end() ? nullptr : &it->second;
}

BoxObject* Scene::find(const std::string& id) {
    auto it = objects.find(id);
    return it == objects.end() ? nullptr : &it->second;
}

bool Scene::is_region(const std::string& id) const {
    for (const auto& r : regions)
        if (r.id == id) return true;
    return false;
}

const Region* Scene::region_with_role(const std::string& role) const {
    for (const auto& r : regions)
        if (r.role == role) return &r;
    return nullptr;
}

IdPair ordered_pair(const std::string& a, const std::string& b) {
    return a < b ? IdPair{a, b} : IdPair{b, a};
}

std::vector<IdPair> broad_phase(const Scene& scene) {
    struct Entry {
        Aabb box;
        const std::string* id;
    };
    std::vector<Entry> entries;
    entries.reserve(scene.objects.size());
    for (const auto& [id, obj] : scene.objects) entries.push_back({box_aabb(obj), &id});
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.box.lo.x < b.box.lo.x; });

    std::vector<IdPair> out;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        for (std::size_t j = i + 1; j < entries.size(); ++j) {
            if (entries[j].box.lo.x > entries[i].box.hi.x) break;
            if (entries[i].box.overlaps(entries[j].box))
                out.push_back(ordered_pair(*entries[i].id, *entries[j].id));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Penetration depth of two yaw-boxes along one horizontal unit axis; the
// caller checks positivity on every axis. Half-extents carry the inflation.
double axis_overlap(const Vec3& d, double ux, double uy, const BoxObject& a, double ha_x,
                    double ha_y, const BoxObject& b, double hb_x, double hb_y) {
    const double ca = std::cos(a.pose.yaw), sa = std::sin(a.pose.yaw);
    const double cb = std::cos(b.pose.yaw), sb = std::sin(b.pose.yaw);
    const double ra = ha_x * std::abs(ux * ca + uy * sa) + ha_y * std::abs(-ux * sa + uy * ca);
    const double rb = hb_x * std::abs(ux * cb + uy * sb) + hb_y * std::abs(-ux * sb + uy * cb);
    const double dist = std::abs(d.x * ux + d.y * uy);
    return ra + rb - dist;
}

}  // namespace

bool box_box_collide(const BoxObject& a, const BoxObject& b, double margin) {
    const double m = margin * 0.5;
    const double az0 = a.bottom() - m, az1 = a.top() + m;
    const double bz0 = b.bottom() - m, bz1 = b.top() + m;
    if (std::min(az1, bz1) - std::max(az0, bz0) <= kContactEps) return false;

    const Vec3 d = b.pose.position - a.pose.position;
    const double ax = a.half_extents.x + m, ay = a.half_extents.y + m;
    const double bx = b.half_extents.x + m, by = b.half_extents.y + m;
    const std::array<std::pair<double, double>, 4> axes = {{
        {std::cos(a.pose.yaw), std::sin(a.pose.yaw)},
        {-std::sin(a.pose.yaw), std::cos(a.pose.yaw)},
        {std::cos(b.pose.yaw), std::sin(b.pose.yaw)},
        {-std::sin(b.pose.yaw), std::cos(b.pose.yaw)},
    }};
    for (const auto& [ux, uy] : axes) {
        if (axis_overlap(d, ux, uy, a, ax, ay, b, bx, by) <= kContactEps) return false;
    }
    return true;
}

std::vector<IdPair> scene_in_collision(const Scene& scene, const std::set<IdPair>& ignore,
                                       double margin) {
    std::vector<IdPair> out;
    for (const auto& pair : broad_phase(scene)) {
        if (ignore.count(pair)) continue;
        const BoxObject* a = scene.find(pair.first);
        const BoxObject* b = scene.find(pair.second);
        if (box_box_collide(*a, *b, margin)) out.push_back(pair);
    }
    return out;
}

bool horizontal_overlap(const BoxObject& a, const BoxObject& b) {
    const Vec3 d = b.pose.position - a.pose.position;
    const std::array<std::pair<double, double>, 4> axes = {{
        {std::cos(a.pose.yaw), std::sin(a.pose.yaw)},
        {-std::sin(a.pose.yaw), std::cos(a.pose.yaw)},
        {std::cos(b.pose.yaw), std::sin(b.pose.yaw)},
        {-std::sin(b.pose.yaw), std::cos(b.pose.yaw)},
    }};
    for (const auto& [ux, uy] : axes) {
        if (axis_overlap(d, ux, uy, a, a.half_extents.x, a.half_extents.y, b, b.half_extents.x,
                         b.half_extents.y) <= kContactEps)
            return false;
    }
    return true;
}

bool point_in_top_face(const BoxObject& b, double x, double y, double skin) {
    const double c = std::cos(b.pose.yaw), s = std::sin(b.pose.yaw);
    const double dx = x - b.pose.position.x, dy = y - b.pose.position.y;
    const double lx = c * dx + s * dy, ly = -s * dx + c * dy;
    return std::abs(lx) <= b.half_extents.x + skin && std::abs(ly) <= b.half_extents.y + skin;
}

bool rests_on(const BoxObject& upper, const BoxObject& lower, double skin) {
    if (&upper == &lower || upper.id == lower.id) return false;
    if (std::abs(upper.bottom() - lower.top()) > skin) return false;
    if (!horizontal_overlap(upper, lower)) return false;
    return point_in_top_face(lower, upper.pose.position.x, upper.pose.position.y, skin);
}

std::set<IdPair> support_contact_pairs(const Scene& scene, double skin) {
    std::set<IdPair> out;
    for (const auto& [ida, a] : scene.objects) {
        for (const auto& [idb, b] : scene.objects) {
            if (ida == idb) continue;
            // Vertical face contact within skin counts even without the
            // center-of-mass condition; a partially supported touch is still
            // not a collision.
            if (std::abs(a.bottom() - b.top()) <= skin && horizontal_overlap(a, b))
                out.insert(ordered_pair(ida, idb));
        }
    }
    return out;
}

}  // namespace tamp::geom
