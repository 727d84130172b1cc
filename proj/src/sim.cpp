#include "tamp/sim.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "tamp/robot.hpp"

namespace tamp::sim {

namespace {

std::string mm(double meters) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(1) << meters * 1000.0 << " mm";
    return os.str();
}

std::string join(const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) {
        if (!out.empty()) out += ", ";
        out += id;
    }
    return out;
}

}  // namespace

const char* to_string(ViolationCategory c) {
    switch (c) {
        case ViolationCategory::GoalCollision: return "goal-collision";
        case ViolationCategory::IkFailure: return "ik-failure";
        case ViolationCategory::MotionFailure: return "motion-failure";
        case ViolationCategory::ExecutionInconsistency: return "execution-inconsistency";
    }
    return "?";
}

const char* to_string(ViolationDetail d) {
    switch (d) {
        case ViolationDetail::GraspSlip: return "grasp-slip";
        case ViolationDetail::ReleaseDisplacement: return "release-displacement";
        case ViolationDetail::Collapse: return "collapse";
        case ViolationDetail::Unsupported: return "unsupported";
        case ViolationDetail::CollisionPair: return "collision-pair";
    }
    return "?";
}

std::string Violation::str() const {
    std::string out = to_string(category);
    if (detail) out += std::string("/") + to_string(*detail);
    out += ": " + message;
    return out;
}

SettleResult settle(const geom::Scene& scene, const std::set<std::string>& frozen,
                    const SimParams& params) {
    SettleResult res;
    res.scene = scene;
    const double skin = params.support_skin;
    const double floor_z = scene.bounds.lo.z;

    std::map<std::string, geom::Vec3> start;
    std::vector<std::string> order;
    for (const auto& [id, obj] : res.scene.objects) {
        if (obj.fixed || frozen.count(id)) continue;
        start[id] = obj.pose.position;
        order.push_back(id);
    }
    std::set<std::string> collapsed;

    for (int pass = 0; pass < params.settle_max_iters; ++pass) {
        std::sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
            double ba = res.scene.objects.at(a).bottom();
            double bb = res.scene.objects.at(b).bottom();
            return ba != bb ? ba < bb : a < b;
        });
        bool moved = false;
        for (const auto& id : order) {
            geom::BoxObject& o = *res.scene.find(id);
            const geom::Vec3& com = o.pose.position;

            // Highest surface below us that our footprint overlaps, and the
            // highest one whose top face actually holds the center of mass.
            double contact_top = floor_z;
            bool any_contact = false;
            double face_top = floor_z;
            bool any_face = false;
            for (const auto& [cid, c] : res.scene.objects) {
                if (cid == id) continue;
                if (c.top() > o.bottom() + skin) continue;
                if (!geom::horizontal_overlap(o, c)) continue;
                any_contact = true;
                contact_top = std::max(contact_top, c.top());
                if (geom::point_in_top_face(c, com.x, com.y, skin)) {
                    any_face = true;
                    face_top = std::max(face_top, c.top());
                }
            }

            double target;
            if (!any_contact) {
                target = floor_z;
                collapsed.insert(id);
            } else if (any_face && face_top >= contact_top - skin) {
                target = contact_top;
            } else {
                // First contact cannot hold the center of mass: it topples.
                target = contact_top;
                collapsed.insert(id);
            }

            double dz = o.bottom() - target;
            if (dz > 1e-12 || (dz < 0.0 && -dz <= skin + 1e-12)) {
                o.pose.position.z -= dz;
                moved = true;
            }
        }
        if (!moved) break;
    }

    for (const auto& [id, p0] : start) {
        double d = (res.scene.objects.at(id).pose.position - p0).norm();
        res.displacement = std::max(res.displacement, d);
    }
    res.collapsed_ids.assign(collapsed.begin(), collapsed.end());
    return res;
}

pddl::SymbolicState evaluate_predicates(const pddl::Task& task, const WorldState& world,
                                        const SimParams& params) {
    std::set<std::string> dynamic;
    for (const auto& schema : task.domain.actions) {
        for (const auto& lit : schema.add_effects) dynamic.insert(lit.pred);
        for (const auto& lit : schema.del_effects) dynamic.insert(lit.pred);
    }
    std::set<pddl::GroundAtom> init_atoms(task.problem.init.begin(), task.problem.init.end());

    const geom::Scene& sc = world.scene;
    const geom::Region* table_region = sc.region_with_role("table");
    const geom::BoxObject* table = table_region ? sc.find(table_region->id) : nullptr;
    const std::string held = world.attachment ? world.attachment->object_id : "";
    const double skin = params.support_skin;

    std::vector<int> ids;
    for (int i = 0; i < task.atoms.size(); ++i) {
        const pddl::GroundAtom& a = task.atoms.atom(i);
        bool truth = false;
        if (!dynamic.count(a.pred)) {
            truth = init_atoms.count(a) > 0;
        } else if (a.pred == "on") {
            const auto* u = sc.find(a.args[0]);
            const auto* l = sc.find(a.args[1]);
            truth = u && l && a.args[0] != held && geom::rests_on(*u, *l, skin);
        } else if (a.pred == "on-table") {
            const auto* u = sc.find(a.args[0]);
            truth = u && table && a.args[0] != held && geom::rests_on(*u, *table, skin);
        } else if (a.pred == "clear") {
            const auto* u = sc.find(a.args[0]);
            truth = u && a.args[0] != held;
            if (truth) {
                for (const auto& [oid, o] : sc.objects) {
                    if (oid == a.args[0] || oid == held) continue;
                    if (geom::rests_on(o, *u, skin)) {
                        truth = false;
                        break;
                    }
                }
            }
        } else if (a.pred == "holding") {
            truth = a.args[0] == held;
        } else if (a.pred == "arm-empty") {
            truth = !world.attachment.has_value();
        } else if (a.pred == "at") {
            const auto* f = sc.find(a.args[0]);
            if (f && a.args[0] != held) {
                if (const auto* r = sc.find(a.args[1])) {
                    truth = geom::rests_on(*f, *r, skin);
                } else if (sc.is_region(a.args[1]) && table) {
                    // A region with no body of its own is the open counter.
                    truth = geom::rests_on(*f, *table, skin);
                }
            }
        } else {
            // Remaining dynamic predicates are appliance flags.
            truth = world.flags.count(a.str()) > 0;
        }
        if (truth) ids.push_back(i);
    }
    return pddl::SymbolicState(std::move(ids));
}

bool consistent(const pddl::Task& task, const pddl::SymbolicState& s, const WorldState& world,
                const SimParams& params) {
    return evaluate_predicates(task, world, params) == s;
}

std::vector<std::string> consistency_violations(const pddl::Task& task,
                                                const pddl::SymbolicState& s,
                                                const WorldState& world,
                                                const SimParams& params) {
    pddl::SymbolicState eval = evaluate_predicates(task, world, params);
    std::vector<std::string> out;
    for (int i = 0; i < task.atoms.size(); ++i) {
        bool want = s.contains(i);
        bool have = eval.contains(i);
        if (want == have) continue;
        const std::string atom = task.atoms.atom(i).str();
        if (want)
            out.push_back("expected " + atom + " but the world does not satisfy it");
        else
            out.push_back("world satisfies " + atom + " which the plan state forbids");
    }
    return out;
}

ExecResult execute(const robot::RobotModel& robot, const pddl::Task& task,
                   const WorldState& world, const pddl::GroundAction& action,
                   const motion::Trajectory& traj, const SimParams& params) {
    ExecResult res;
    res.world = world;
    WorldState& w = res.world;
    auto fail = [&](const std::string& msg,
                    std::optional<ViolationDetail> detail = std::nullopt) {
        res.ok = false;
        res.violation = msg;
        res.detail = detail;
        return res;
    };

    const auto& schema = task.domain.actions.at(static_cast<std::size_t>(action.schema_index));
    if (traj.waypoints.empty()) return fail("empty trajectory for " + action.name);
    if (robot::config_distance(traj.waypoints.front(), w.q) > 1e-9)
        return fail("trajectory for " + action.name +
                    " does not start at the current arm configuration");

    static const std::map<std::string, std::string> kFlagOf = {{"clean", "cleaned"},
                                                               {"cook", "cooked"}};
    if (auto it = kFlagOf.find(schema.name); it != kFlagOf.end()) {
        if (traj.cspace_length() > 1e-9)
            return fail("appliance action " + action.name + " must not move the arm");
        w.flags.insert("(" + it->second + " " + action.binding.at(0) + ")");
        res.ok = true;
        return res;
    }

    const bool grasp = schema.name == "pickup" || schema.name == "unstack";
    const bool place = schema.name == "putdown" || schema.name == "stack";
    if (!grasp && !place) return fail("no executor for action schema '" + schema.name + "'");
    const std::string& target = action.binding.at(0);

    // While carrying, a gripper translation beyond max_ee_step in a single
    // interpolation step shakes the object loose. Unloaded moves are free to
    // step coarsely.
    if (w.attachment) {
        for (std::size_t i = 1; i < traj.waypoints.size(); ++i) {
            geom::Pose e0 = robot::forward_kinematics(robot, traj.waypoints[i - 1]);
            geom::Pose e1 = robot::forward_kinematics(robot, traj.waypoints[i]);
            double step = (e1.position - e0.position).norm();
            if (step > params.max_ee_step)
                return fail("gripper moved " + mm(step) + " in one step (limit " +
                            mm(params.max_ee_step) + "), the grasp on " +
                            w.attachment->object_id + " would slip",
                            ViolationDetail::GraspSlip);
        }
    }
    w.q = traj.waypoints.back();
    geom::Pose ee = robot::forward_kinematics(robot, w.q);
    if (w.attachment) {
        geom::BoxObject* held = w.scene.find(w.attachment->object_id);
        if (!held) return fail("held object " + w.attachment->object_id + " is missing");
        held->pose = ee.compose(w.attachment->grasp_offset);
    }

    if (grasp) {
        if (w.attachment)
            return fail("cannot grasp " + target + ", gripper already holds " +
                        w.attachment->object_id);
        geom::BoxObject* obj = w.scene.find(target);
        if (!obj) return fail("unknown object " + target);
        geom::Vec3 grasp_point{obj->pose.position.x, obj->pose.position.y,
                               obj->top() + params.grasp_standoff};
        double miss = (ee.position - grasp_point).norm();
        if (miss > params.gripper_reach)
            return fail("grasp of " + target + " missed, gripper ended " + mm(miss) +
                        " from the grasp point (reach " + mm(params.gripper_reach) + ")",
                        ViolationDetail::GraspSlip);
        obj->pose.position.z += params.attach_lift;
        w.attachment = motion::Attachment{target, ee.inverse().compose(obj->pose)};

        SettleResult st = settle(w.scene, {target}, params);
        w.scene = st.scene;
        res.settle_displacement = st.displacement;
        if (!st.collapsed_ids.empty())
            return fail("grasping " + target + " collapsed: " + join(st.collapsed_ids),
                        ViolationDetail::Collapse);
    } else {
        if (!w.attachment || w.attachment->object_id != target)
            return fail("cannot place " + target + ", it is not in the gripper");
        geom::Vec3 release_at = w.scene.find(target)->pose.position;
        w.attachment.reset();

        SettleResult st = settle(w.scene, {}, params);
        w.scene = st.scene;
        res.settle_displacement = st.displacement;
        if (!st.collapsed_ids.empty())
            return fail("placing " + target + " collapsed: " + join(st.collapsed_ids),
                        ViolationDetail::Collapse);
        double drop = (w.scene.find(target)->pose.position - release_at).norm();
        if (drop > params.release_threshold)
            return fail("released " + target + " fell " + mm(drop) + " (limit " +
                        mm(params.release_threshold) + ")",
                        ViolationDetail::ReleaseDisplacement);
    }

    auto contacts = geom::scene_in_collision(w.scene, {}, 0.0);
    if (!contacts.empty())
        return fail("objects interpenetrate after " + action.name + ": " +
                    contacts.front().first + " / " + contacts.front().second,
                    ViolationDetail::CollisionPair);
    res.ok = true;
    return res;
}

}  // namespace tamp::sim
