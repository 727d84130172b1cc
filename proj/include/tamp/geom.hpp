#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace tamp::geom {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
    bool finite() const;
};

// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

// Rigid transform restricted to translation + rotation about the vertical axis.
struct Pose {
    Vec3 position;
    double yaw = 0.0;

    Vec3 apply(const Vec3& local) const;
    Pose compose(const Pose& local) const;
    Pose inverse() const;
};

struct Rgb {
    std::uint8_t r = 200, g = 200, b = 200;
    bool operator==(const Rgb&) const = default;
};

struct BoxObject {
    std::string id;
    Vec3 half_extents{0.01, 0.01, 0.01};
    Pose pose;
    bool fixed = false;
    double mass = 1.0;
    Rgb color;

    double top() const { return pose.position.z + half_extents.z; }
    double bottom() const { return pose.position.z - half_extents.z; }
};

struct Aabb {
    Vec3 lo, hi;
    bool overlaps(const Aabb& o) const {
        return lo.x <= o.hi.x && o.lo.x <= hi.x && lo.y <= o.hi.y && o.lo.y <= hi.y &&
               lo.z <= o.hi.z && o.lo.z <= hi.z;
    }
    bool contains(const Vec3& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z &&
               p.z <= hi.z;
    }
};

Aabb box_aabb(const BoxObject& b, double inflate = 0.0);

// Named support surface within a scene. The role tells the simulator what the
// surface means ("table", "sink", "stove").
struct Region {
    std::string id;
    std::string role;
};

struct Scene {
    std::map<std::string, BoxObject> objects;
    std::vector<Region> regions;
    Aabb bounds{{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}};

    const BoxObject* find(const std::string& id) const;
    BoxObject* find(const std::string& id);
    bool is_region(const std::string& id) const;
    const Region* region_with_role(const std::string& role) const;
};

// Unordered pair of ids stored in lexicographic order.
using IdPair = std::pair<std::string, std::string>;
IdPair ordered_pair(const std::string& a, const std::string& b);

// Sweep-and-prune broad phase over AABBs. Returns every pair whose AABBs
// overlap, sorted; a superset of the narrow-phase result.
std::vector<IdPair> broad_phase(const Scene& scene);

// Separating-axis test for two yaw-rotated boxes, each inflated by margin/2.
// Touching boxes (zero penetration) do not collide.
bool box_box_collide(const BoxObject& a, const BoxObject& b, double margin);

std::vector<IdPair> scene_in_collision(const Scene& scene, const std::set<IdPair>& ignore,
                                       double margin);

// --- support queries shared by the settle step and the predicate evaluator ---

// True iff the horizontal footprints of the two boxes intersect (2-D SAT).
bool horizontal_overlap(const BoxObject& a, const BoxObject& b);

// True iff (x, y) lies inside the top face of b, inflated by skin.
bool point_in_top_face(const BoxObject& b, double x, double y, double skin);

// True iff upper's bottom face touches lower's top face within skin and
// upper's center of mass projects into lower's top face.
bool rests_on(const BoxObject& upper, const BoxObject& lower, double skin);

// All resting-contact pairs in the scene; these count as support, not
// collision, and are the canonical ignore set for collision queries.
std::set<IdPair> support_contact_pairs(const Scene& scene, double skin);

}  // namespace tamp::geom
