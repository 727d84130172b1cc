#include "tamp/hybrid.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tamp/render.hpp"

namespace tamp::hybrid {

using json = nlohmann::ordered_json;

double WallClock::now() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

const char* status_name(NodeStatus s) {
    switch (s) {
        case NodeStatus::Open: return "open";
        case NodeStatus::Expanded: return "expanded";
        case NodeStatus::Exhausted: return "exhausted";
    }
    return "?";
}

namespace {

constexpr double kRootGap = 0.01;    // clearance between sampled initial objects
constexpr double kEdgeInset = 0.02;  // placement inset from support edges
constexpr double kStackJitter = 0.002;

const geom::BoxObject* table_body(const geom::Scene& sc) {
    const geom::Region* r = sc.region_with_role("table");
    return r ? sc.find(r->id) : nullptr;
}

const pddl::ActionSchema& schema_of(const pddl::Task& task, const pddl::GroundAction& a) {
    return task.domain.actions.at(static_cast<std::size_t>(a.schema_index));
}

bool is_grasp(const std::string& s) { return s == "pickup" || s == "unstack"; }
bool is_place(const std::string& s) { return s == "putdown" || s == "stack"; }
bool is_appliance(const std::string& s) { return s == "clean" || s == "cook"; }

// Support box a place action targets: the second argument when it names an
// object or a region with a body, the table otherwise.
const geom::BoxObject* place_support(const geom::Scene& sc, const pddl::GroundAction& a) {
    if (a.binding.size() > 1) {
        if (const geom::BoxObject* b = sc.find(a.binding[1])) return b;
    }
    return table_body(sc);
}

double draw(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool object_collides(const geom::Scene& sc, const geom::BoxObject& candidate, double margin) {
    for (const auto& [id, other] : sc.objects) {
        if (id == candidate.id) continue;
        if (geom::box_box_collide(candidate, other, margin)) return true;
    }
    return false;
}

// Like object_collides, but bodies whose top face sits at or below the
// candidate's bottom are skipped: the support being rested on must not count
// as a margin violation.
bool placement_collides(const geom::Scene& sc, const geom::BoxObject& candidate, double margin) {
    for (const auto& [id, other] : sc.objects) {
        if (id == candidate.id) continue;
        if (other.top() <= candidate.bottom() + 1e-9) continue;
        if (geom::box_box_collide(candidate, other, margin)) return true;
    }
    return false;
}

std::string fmt_m(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << v;
    return os.str();
}

// --- serialization helpers shared by tree dumps and plan files ---

json pose_json(const geom::Pose& p) {
    return json::array({p.position.x, p.position.y, p.position.z, p.yaw});
}

geom::Pose pose_from(const json& j) {
    return {{j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()},
            j.at(3).get<double>()};
}

json config_json(const robot::Config& c) {
    json a = json::array();
    for (double q : c.q) a.push_back(q);
    return a;
}

robot::Config config_from(const json& j) {
    robot::Config c;
    for (std::size_t i = 0; i < 5; ++i) c.q[i] = j.at(i).get<double>();
    return c;
}

json vec_json(const geom::Vec3& v) { return json::array({v.x, v.y, v.z}); }

geom::Vec3 vec_from(const json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

json scene_json(const geom::Scene& sc) {
    json objs = json::array();
    for (const auto& [id, o] : sc.objects) {
        objs.push_back({{"id", id},
                        {"half", vec_json(o.half_extents)},
                        {"pose", pose_json(o.pose)},
                        {"fixed", o.fixed},
                        {"color", json::array({o.color.r, o.color.g, o.color.b})}});
    }
    json regions = json::array();
    for (const auto& r : sc.regions) regions.push_back({{"id", r.id}, {"role", r.role}});
    return {{"bounds", json::array({vec_json(sc.bounds.lo), vec_json(sc.bounds.hi)})},
            {"objects", objs},
            {"regions", regions}};
}

geom::Scene scene_from(const json& j) {
    geom::Scene sc;
    sc.bounds.lo = vec_from(j.at("bounds").at(0));
    sc.bounds.hi = vec_from(j.at("bounds").at(1));
    for (const auto& jo : j.at("objects")) {
        geom::BoxObject o;
        o.id = jo.at("id").get<std::string>();
        o.half_extents = vec_from(jo.at("half"));
        o.pose = pose_from(jo.at("pose"));
        o.fixed = jo.at("fixed").get<bool>();
        const auto& c = jo.at("color");
        o.color = {c.at(0).get<std::uint8_t>(), c.at(1).get<std::uint8_t>(),
                   c.at(2).get<std::uint8_t>()};
        sc.objects.emplace(o.id, o);
    }
    for (const auto& jr : j.at("regions"))
        sc.regions.push_back({jr.at("id").get<std::string>(), jr.at("role").get<std::string>()});
    return sc;
}

json world_json(const sim::WorldState& w) {
    json j{{"q", config_json(w.q)}};
    if (w.attachment) {
        j["attachment"] = {{"object", w.attachment->object_id},
                           {"offset", pose_json(w.attachment->grasp_offset)}};
    } else {
        j["attachment"] = nullptr;
    }
    j["flags"] = json::array();
    for (const auto& f : w.flags) j["flags"].push_back(f);
    j["scene"] = scene_json(w.scene);
    return j;
}

sim::WorldState world_from(const json& j) {
    sim::WorldState w;
    w.q = config_from(j.at("q"));
    if (!j.at("attachment").is_null()) {
        w.attachment = motion::Attachment{j.at("attachment").at("object").get<std::string>(),
                                          pose_from(j.at("attachment").at("offset"))};
    }
    for (const auto& f : j.at("flags")) w.flags.insert(f.get<std::string>());
    w.scene = scene_from(j.at("scene"));
    return w;
}

json sim_json(const sim::SimParams& p) {
    return {{"support_skin", p.support_skin},
            {"grasp_standoff", p.grasp_standoff},
            {"gripper_reach", p.gripper_reach},
            {"attach_lift", p.attach_lift},
            {"place_clearance", p.place_clearance},
            {"release_threshold", p.release_threshold},
            {"max_ee_step", p.max_ee_step},
            {"settle_max_iters", p.settle_max_iters}};
}

sim::SimParams sim_from(const json& j) {
    sim::SimParams p;
    p.support_skin = j.at("support_skin").get<double>();
    p.grasp_standoff = j.at("grasp_standoff").get<double>();
    p.gripper_reach = j.at("gripper_reach").get<double>();
    p.attach_lift = j.at("attach_lift").get<double>();
    p.place_clearance = j.at("place_clearance").get<double>();
    p.release_threshold = j.at("release_threshold").get<double>();
    p.max_ee_step = j.at("max_ee_step").get<double>();
    p.settle_max_iters = j.at("settle_max_iters").get<int>();
    return p;
}

std::string goal_text(const pddl::Task& task) {
    std::string out = "domain " + task.domain.name + ", achieve:";
    for (int id : task.goal_ids) out += " " + task.atoms.atom(id).str();
    return out;
}

}  // namespace

std::string tree_to_json(const HybridTree& tree, const pddl::Task& task) {
    json nodes = json::array();
    json edges = json::array();
    for (const auto& n : tree.nodes) {
        json poses = json::object();
        for (const auto& [id, o] : n.world.scene.objects)
            if (!o.fixed) poses[id] = pose_json(o.pose);
        json atoms = json::array();
        for (const auto& a : n.symbolic.atoms(task.atoms)) atoms.push_back(a.str());
        nodes.push_back({{"id", n.id},
                         {"status", status_name(n.status)},
                         {"parent", n.parent < 0 ? json(nullptr) : json(n.parent)},
                         {"depth", n.depth},
                         {"retry_count", n.retry_count},
                         {"action", n.incoming ? json(n.incoming->action) : json(nullptr)},
                         {"symbolic", atoms},
                         {"poses", poses},
                         {"config", config_json(n.world.q)}});
    }
    for (const auto& n : tree.nodes) {
        for (int c : n.children) {
            const HybridNode& child = tree.nodes[static_cast<std::size_t>(c)];
            edges.push_back({{"src", n.id},
                             {"dst", c},
                             {"action", child.incoming ? child.incoming->action : ""},
                             {"feasible", true},
                             {"ee_goal", child.incoming ? pose_json(child.incoming->ee_goal)
                                                        : json(nullptr)}});
        }
        for (const auto& f : n.failures) {
            edges.push_back({{"src", n.id},
                             {"dst", nullptr},
                             {"action", f.action},
                             {"feasible", false},
                             {"violation", f.violation.str()}});
        }
    }
    return json{{"root", tree.root}, {"nodes", nodes}, {"edges", edges}}.dump(1);
}

std::optional<geom::Pose> sample_ee_goal(const robot::RobotModel& robot, const pddl::Task& task,
                                         const pddl::GroundAction& action,
                                         const sim::WorldState& world,
                                         const sim::SimParams& sim, int samples,
                                         std::mt19937_64& rng) {
    (void)robot;
    (void)sim;
    const auto& schema = schema_of(task, action);
    const geom::Scene& sc = world.scene;

    if (is_grasp(schema.name)) {
        const geom::BoxObject* obj = sc.find(action.binding.at(0));
        if (!obj) return std::nullopt;
        double yaw = draw(rng, -M_PI, M_PI);
        return geom::Pose{{obj->pose.position.x, obj->pose.position.y, obj->top() + kGraspAbove},
                          yaw};
    }
    if (!is_place(schema.name)) return std::nullopt;

    const geom::BoxObject* held = sc.find(action.binding.at(0));
    if (!held || !world.attachment || world.attachment->object_id != action.binding.at(0))
        return std::nullopt;
    const geom::BoxObject* support = place_support(sc, action);
    if (!support) return std::nullopt;

    // Placement window: full containment on a dedicated support (pads), an
    // inset window on the table, and the center half of another object's top
    // face so the stacked block stays stably supported.
    const bool on_table = table_body(sc) == support;
    const bool on_object = !sc.is_region(support->id) && !support->fixed;
    double wx, wy;
    if (on_object) {
        wx = support->half_extents.x * 0.5;
        wy = support->half_extents.y * 0.5;
    } else {
        double inset = on_table ? kEdgeInset : 0.002;
        wx = std::max(0.0, support->half_extents.x - held->half_extents.x - inset);
        wy = std::max(0.0, support->half_extents.y - held->half_extents.y - inset);
    }

    for (int i = 0; i < samples; ++i) {
        geom::BoxObject probe = *held;
        probe.pose.position.x = support->pose.position.x + draw(rng, -wx, wx);
        probe.pose.position.y = support->pose.position.y + draw(rng, -wy, wy);
        probe.pose.position.z = support->top() + held->half_extents.z + kPlaceHover;
        probe.pose.yaw = draw(rng, -M_PI, M_PI);
        if (object_collides(sc, probe, 0.0)) continue;
        return probe.pose.compose(world.attachment->grasp_offset.inverse());
    }
    return std::nullopt;
}

std::variant<ActionBinding, sim::Violation> refine_action(
    const robot::RobotModel& robot, const pddl::Task& task, const sim::WorldState& world,
    const pddl::GroundAction& action, const PlannerConfig& cfg, const sim::SimParams& sim,
    std::mt19937_64& rng) {
    using sim::Violation;
    using sim::ViolationCategory;
    using sim::ViolationDetail;

    const auto& schema = schema_of(task, action);
    ActionBinding b;
    b.action_id = -1;
    b.action = action.name;
    b.start_config = world.q;

    if (is_appliance(schema.name)) {
        b.ee_goal = robot::forward_kinematics(robot, world.q);
        b.goal_config = world.q;
        b.trajectory.waypoints = {world.q, world.q};
        return b;
    }
    if (!is_grasp(schema.name) && !is_place(schema.name))
        throw std::runtime_error("no refinement strategy for action schema '" + schema.name + "'");

    auto ee = sample_ee_goal(robot, task, action, world, sim, cfg.samples_per_action, rng);
    if (!ee) {
        return Violation{ViolationCategory::GoalCollision, ViolationDetail::CollisionPair,
                         "no collision-free goal pose for " + action.name + " after " +
                             std::to_string(cfg.samples_per_action) + " draws"};
    }

    // Inverse kinematics is purely kinematic, so solutions that stab the
    // scene are discarded and another restart is drawn. A target is only
    // unreachable when no restart closes at all; reachable-but-always-
    // colliding goals are a collision failure, not an IK one.
    std::optional<robot::Config> goal_q;
    geom::IdPair hit;
    bool collided = false;
    for (int i = 0; i < cfg.ik_attempts && !goal_q; ++i) {
        auto q = robot::inverse_kinematics(robot, *ee, world.q, rng);
        if (!q) continue;
        if (motion::config_collides(robot, *q, world.scene, world.attachment, cfg.margin, &hit)) {
            collided = true;
            continue;
        }
        goal_q = q;
    }
    if (!goal_q) {
        if (collided) {
            return Violation{ViolationCategory::GoalCollision, ViolationDetail::CollisionPair,
                             action.name + ": every reachable goal configuration collides (" +
                                 hit.first + " / " + hit.second + ")"};
        }
        return Violation{ViolationCategory::IkFailure, std::nullopt,
                         "no inverse kinematics solution for " + action.name + " targeting (" +
                             fmt_m(ee->position.x) + ", " + fmt_m(ee->position.y) + ", " +
                             fmt_m(ee->position.z) + ")"};
    }

    motion::MotionRequest req{world.q, *goal_q, world.scene, world.attachment, cfg.margin};
    motion::MotionResult res = motion::plan_rrt_connect(robot, req, rng, cfg.rrt_max_iters);
    if (const auto* err = std::get_if<motion::MotionError>(&res)) {
        switch (err->kind) {
            case motion::MotionErrorKind::GoalInCollision:
                return Violation{ViolationCategory::GoalCollision, ViolationDetail::CollisionPair,
                                 action.name + ": " + err->detail};
            case motion::MotionErrorKind::StartInCollision:
                return Violation{ViolationCategory::MotionFailure, ViolationDetail::CollisionPair,
                                 action.name + ": " + err->detail};
            case motion::MotionErrorKind::NoPathWithinBudget:
                break;
        }
        return Violation{ViolationCategory::MotionFailure, std::nullopt,
                         action.name + ": " + err->detail};
    }
    b.ee_goal = *ee;
    b.goal_config = *goal_q;
    b.trajectory = std::get<motion::Trajectory>(res);
    return b;
}

sim::WorldState sample_root_world(const pddl::Task& task, const geom::Scene& scene,
                                  const robot::RobotModel& robot, const sim::SimParams& sim,
                                  int budget, std::mt19937_64& rng) {
    // Geometric reading of the initial atoms: what rests on what, and which
    // non-geometric flags start true.
    struct Spec {
        std::string support;  // empty means table (or a bodiless region)
    };
    std::map<std::string, Spec> placement;
    std::set<std::string> flags;
    std::set<std::string> geometric{"on", "on-table", "clear", "holding", "arm-empty", "at"};
    std::set<std::string> dynamic;
    for (const auto& s : task.domain.actions) {
        for (const auto& l : s.add_effects) dynamic.insert(l.pred);
        for (const auto& l : s.del_effects) dynamic.insert(l.pred);
    }

    for (const auto& a : task.problem.init) {
        if (a.pred == "holding")
            throw std::runtime_error("initial state holds " + a.args[0] +
                                     ", which cannot be instantiated");
        std::optional<std::pair<std::string, std::string>> rest;  // object, support
        if (a.pred == "on")
            rest = {{a.args[0], a.args[1]}};
        else if (a.pred == "on-table")
            rest = {{a.args[0], ""}};
        else if (a.pred == "at")
            rest = {{a.args[0], scene.find(a.args[1]) ? a.args[1] : ""}};
        else if (dynamic.count(a.pred) && !geometric.count(a.pred))
            flags.insert(a.str());
        if (!rest) continue;
        if (placement.count(rest->first))
            throw std::runtime_error(rest->first + " has two supports in the initial state");
        if (rest->first == rest->second)
            throw std::runtime_error(rest->first + " cannot rest on itself");
        const geom::BoxObject* o = scene.find(rest->first);
        if (!o || o->fixed)
            throw std::runtime_error("initial atom places unknown or fixed object " +
                                     rest->first);
        placement[rest->first] = {rest->second};
    }

    // Bottom-up order over the support relation; a cycle has no order.
    std::vector<std::string> order;
    {
        std::map<std::string, int> state;  // 0 new, 1 visiting, 2 done
        std::function<void(const std::string&)> visit = [&](const std::string& id) {
            int& st = state[id];
            if (st == 2) return;
            if (st == 1) throw std::runtime_error("cyclic support in the initial state at " + id);
            st = 1;
            auto it = placement.find(id);
            if (it != placement.end() && !it->second.support.empty() &&
                placement.count(it->second.support))
                visit(it->second.support);
            st = 2;
            order.push_back(id);
        };
        for (const auto& [id, spec] : placement) visit(id);
    }

    const geom::BoxObject* table = table_body(scene);

    auto attempt = [&](bool redraw) -> std::optional<sim::WorldState> {
        geom::Scene sc = scene;
        if (redraw) {
            for (const auto& id : order) {
                geom::BoxObject& o = *sc.find(id);
                const Spec& spec = placement.at(id);
                const geom::BoxObject* sup =
                    spec.support.empty() ? table : sc.find(spec.support);
                if (!sup) return std::nullopt;
                bool stacked = !spec.support.empty() && !sc.is_region(spec.support);
                bool ok = false;
                for (int d = 0; d < 40 && !ok; ++d) {
                    if (stacked) {
                        o.pose.position.x = sup->pose.position.x + draw(rng, -kStackJitter,
                                                                        kStackJitter);
                        o.pose.position.y = sup->pose.position.y + draw(rng, -kStackJitter,
                                                                        kStackJitter);
                    } else {
                        double wx = std::max(0.0, sup->half_extents.x - o.half_extents.x -
                                                      kEdgeInset);
                        double wy = std::max(0.0, sup->half_extents.y - o.half_extents.y -
                                                      kEdgeInset);
                        o.pose.position.x = sup->pose.position.x + draw(rng, -wx, wx);
                        o.pose.position.y = sup->pose.position.y + draw(rng, -wy, wy);
                    }
                    o.pose.position.z = sup->top() + o.half_extents.z;
                    o.pose.yaw = 0.0;
                    ok = !placement_collides(sc, o, stacked ? 0.0 : kRootGap);
                }
                if (!ok) return std::nullopt;
            }
        }
        sim::SettleResult settled = sim::settle(sc, {}, sim);
        sim::WorldState w;
        w.scene = settled.scene;
        w.q = robot.ready;
        w.flags = flags;
        if (!sim::consistent(task, task.init, w, sim)) return std::nullopt;
        if (!geom::scene_in_collision(w.scene, {}, 0.0).empty()) return std::nullopt;
        if (motion::config_collides(robot, w.q, w.scene, std::nullopt, 0.0)) return std::nullopt;
        return w;
    };

    // The template's own poses first, so curated scenes pass unchanged.
    if (auto w = attempt(false)) return *w;
    for (int i = 0; i < budget; ++i)
        if (auto w = attempt(true)) return *w;
    throw std::runtime_error("no consistent initial world within " + std::to_string(budget) +
                             " samples");
}

namespace {

// Goal snapshot for advisors that look at images: objects named by goal
// support atoms are teleported onto their desired supports; everything else
// stays where the current world has it.
geom::Scene goal_preview(const pddl::Task& task, const sim::WorldState& world) {
    geom::Scene sc = world.scene;
    const geom::BoxObject* table = table_body(sc);
    std::vector<pddl::GroundAtom> goals;
    for (int id : task.goal_ids) goals.push_back(task.atoms.atom(id));

    auto place_on = [&](const std::string& obj_id, const geom::BoxObject* sup) {
        geom::BoxObject* o = sc.find(obj_id);
        if (!o || !sup || o->fixed) return;
        geom::BoxObject probe = *o;
        probe.pose.yaw = 0.0;
        double wx = std::max(0.0, sup->half_extents.x - o->half_extents.x);
        double wy = std::max(0.0, sup->half_extents.y - o->half_extents.y);
        // march a deterministic grid over the support until the spot is free
        double step = std::max(o->half_extents.x, o->half_extents.y) * 2.0 + 0.005;
        for (double dy = -wy; dy <= wy + 1e-12; dy += step) {
            for (double dx = -wx; dx <= wx + 1e-12; dx += step) {
                probe.pose.position = {sup->pose.position.x + dx, sup->pose.position.y + dy,
                                       sup->top() + o->half_extents.z};
                if (!placement_collides(sc, probe, 0.001)) {
                    o->pose = probe.pose;
                    return;
                }
            }
            if (wx == 0.0 && wy == 0.0) break;
        }
        o->pose.position = {sup->pose.position.x, sup->pose.position.y,
                            sup->top() + o->half_extents.z};
        o->pose.yaw = 0.0;
    };

    // Bases first, then stacks, repeated so chains land bottom-up.
    for (const auto& g : goals) {
        if (g.pred == "on-table") place_on(g.args[0], table);
        if (g.pred == "at") {
            const geom::BoxObject* sup = sc.find(g.args[1]);
            place_on(g.args[0], sup ? sup : table);
        }
    }
    for (int pass = 0; pass < 4; ++pass)
        for (const auto& g : goals)
            if (g.pred == "on") place_on(g.args[0], sc.find(g.args[1]));
    return sc;
}

class Planner {
  public:
    Planner(const PlanInputs& in, const PlannerConfig& cfg, advisor::Advisor& adv, Clock& clock)
        : in_(in), cfg_(cfg), adv_(adv), clock_(clock), rng_(cfg.seed) {}

    PlanResult run() {
        t0_ = clock_.now();
        res_.root_world.scene = in_.scene;

        try {
            res_.topk = topk::solve_topk(in_.task, cfg_.k, cfg_.node_budget);
        } catch (const topk::UnsolvableError&) {
            return finish(false, "unsolvable", -1);
        }
        if (res_.topk.plans.empty()) return finish(false, "unsolvable", -1);
        res_.graph = dgraph::build_graph(in_.task, res_.topk);

        try {
            sim::WorldState root = in_.root_world
                                       ? *in_.root_world
                                       : sample_root_world(in_.task, in_.scene, in_.robot,
                                                           in_.sim, cfg_.root_sample_budget,
                                                           rng_);
            if (in_.root_world && !sim::consistent(in_.task, in_.task.init, root, in_.sim))
                throw std::runtime_error("provided root world is inconsistent with the "
                                         "initial state");
            HybridNode n;
            n.id = 0;
            n.symbolic = in_.task.init;
            n.world = std::move(root);
            tree_.nodes.push_back(std::move(n));
        } catch (const std::exception&) {
            return finish(false, "no-consistent-root", -1);
        }
        res_.root_world = tree_.nodes[0].world;

        int current = 0;
        while (true) {
            if (timed_out()) return finish(false, "timeout", -1);
            if (goal_reached(current)) return finish(true, "", current);

            ExpandOutcome out = expand(current);
            int attempts = 0;
            while (!out.selected && attempts < cfg_.retries) {
                if (timed_out()) return finish(false, "timeout", -1);
                ++attempts;
                ++res_.retries;
                ++tree_.nodes[static_cast<std::size_t>(current)].retry_count;
                out = expand(current);
            }
            if (out.selected) {
                if (out.goal_hit) return finish(true, "", *out.selected);
                current = *out.selected;
                continue;
            }

            // Persistent failure: close the node and ask where to resume.
            tree_.nodes[static_cast<std::size_t>(current)].status = NodeStatus::Exhausted;
            int next = backtrack(current);
            if (next < 0) return finish(false, "exhausted", -1);
            current = next;
        }
    }

  private:
    struct ExpandOutcome {
        std::optional<int> selected;
        bool goal_hit = false;
    };

    bool timed_out() { return clock_.now() - t0_ > cfg_.timeout_s; }

    bool goal_reached(int id) {
        const HybridNode& n = tree_.nodes[static_cast<std::size_t>(id)];
        return n.symbolic.superset_of(in_.task.goal_ids) &&
               sim::consistent(in_.task, n.symbolic, n.world, in_.sim);
    }

    std::vector<int> untried_actions(const HybridNode& n) {
        if (!res_.graph.node_of(n.symbolic)) return {};
        std::vector<int> ids = dgraph::admissible_action_ids(res_.graph, in_.task, n.symbolic);
        ids.erase(std::remove_if(ids.begin(), ids.end(),
                                 [&](int a) {
                                     return std::find(n.child_actions.begin(),
                                                      n.child_actions.end(),
                                                      a) != n.child_actions.end();
                                 }),
                  ids.end());
        return ids;
    }

    void note_failure(int nid, const std::string& action, sim::Violation v) {
        auto& notes = tree_.nodes[static_cast<std::size_t>(nid)].failures;
        for (const auto& f : notes)
            if (f.action == action && f.violation.category == v.category &&
                f.violation.detail == v.detail)
                return;
        notes.push_back({action, std::move(v)});
    }

    std::vector<advisor::LabeledImage> views_of(const geom::Scene& sc, const std::string& tag) {
        std::vector<advisor::LabeledImage> out;
        auto imgs = render::render_all(sc, cfg_.image_size, cfg_.image_size);
        for (int v = 0; v < 4; ++v) {
            out.push_back({tag + " " + render::view_name(static_cast<render::View>(v)),
                           std::move(imgs[static_cast<std::size_t>(v)])});
        }
        return out;
    }

    ExpandOutcome expand(int nid) {
        ++res_.expansions;
        ExpandOutcome out;
        const pddl::SymbolicState parent_sym =
            tree_.nodes[static_cast<std::size_t>(nid)].symbolic;
        const sim::WorldState parent_world = tree_.nodes[static_cast<std::size_t>(nid)].world;
        std::vector<advisor::Candidate> cands;

        for (int aid : untried_actions(tree_.nodes[static_cast<std::size_t>(nid)])) {
            if (timed_out()) break;
            const pddl::GroundAction& action = in_.task.actions[static_cast<std::size_t>(aid)];
            auto refined =
                refine_action(in_.robot, in_.task, parent_world, action, cfg_, in_.sim, rng_);
            if (auto* v = std::get_if<sim::Violation>(&refined)) {
                note_failure(nid, action.name, std::move(*v));
                continue;
            }
            ActionBinding binding = std::move(std::get<ActionBinding>(refined));
            binding.action_id = aid;

            sim::ExecResult exec =
                sim::execute(in_.robot, in_.task, parent_world, action, binding.trajectory,
                             in_.sim);
            if (!exec.ok) {
                note_failure(nid, action.name,
                             {sim::ViolationCategory::ExecutionInconsistency, exec.detail,
                              exec.violation});
                continue;
            }
            pddl::SymbolicState expected = pddl::apply(parent_sym, action);
            if (!sim::consistent(in_.task, expected, exec.world, in_.sim)) {
                auto why = sim::consistency_violations(in_.task, expected, exec.world, in_.sim);
                std::string msg = action.name + " executed but left the world inconsistent";
                if (!why.empty()) msg += ": " + why.front();
                note_failure(nid, action.name,
                             {sim::ViolationCategory::ExecutionInconsistency,
                              sim::ViolationDetail::Unsupported, msg});
                continue;
            }

            HybridNode child;
            child.id = static_cast<int>(tree_.nodes.size());
            child.parent = nid;
            child.depth = tree_.nodes[static_cast<std::size_t>(nid)].depth + 1;
            child.symbolic = expected;
            child.world = std::move(exec.world);
            child.incoming = std::move(binding);
            child.displacement = exec.settle_displacement;
            int cid = child.id;
            tree_.nodes.push_back(std::move(child));
            auto& parent = tree_.nodes[static_cast<std::size_t>(nid)];
            parent.children.push_back(cid);
            parent.child_actions.push_back(aid);

            std::optional<int> dist;
            if (res_.graph.node_of(expected))
                dist = dgraph::distance_to_goal(res_.graph, expected);
            cands.push_back({cid, action.name, dist, exec.settle_displacement});

            if (expected.superset_of(in_.task.goal_ids)) {
                parent.status = NodeStatus::Expanded;
                log({{"kind", "goal"}, {"node", nid}, {"chosen", cid}});
                out.selected = cid;
                out.goal_hit = true;
                return out;
            }
        }
        if (cands.empty()) return out;

        tree_.nodes[static_cast<std::size_t>(nid)].status = NodeStatus::Expanded;
        advisor::SuccessorQuery q;
        q.node_id = nid;
        q.goal = goal_text(in_.task);
        q.candidates = cands;
        if (adv_.wants_images()) {
            q.tree_json = tree_to_json(tree_, in_.task);
            q.images = views_of(parent_world.scene, "current");
            for (const auto& c : cands) {
                auto imgs = views_of(
                    tree_.nodes[static_cast<std::size_t>(c.node_id)].world.scene,
                    "candidate " + std::to_string(c.node_id));
                for (auto& im : imgs) q.images.push_back(std::move(im));
            }
        }
        int reply = adv_.select_successor(q);
        bool valid = std::any_of(cands.begin(), cands.end(),
                                 [&](const advisor::Candidate& c) { return c.node_id == reply; });
        int chosen = valid ? reply : advisor::HeuristicAdvisor{}.select_successor(q);
        json opts = json::array();
        for (const auto& c : cands) opts.push_back(c.node_id);
        log({{"kind", "successor"},
             {"node", nid},
             {"candidates", opts},
             {"reply", reply},
             {"chosen", chosen},
             {"fallback", !valid}});
        out.selected = chosen;
        return out;
    }

    std::vector<advisor::OpenNode> open_nodes() {
        std::vector<advisor::OpenNode> open;
        for (const auto& n : tree_.nodes) {
            if (n.status == NodeStatus::Exhausted) continue;
            int untried = static_cast<int>(untried_actions(n).size());
            if (untried == 0) continue;
            std::optional<int> dist;
            if (res_.graph.node_of(n.symbolic))
                dist = dgraph::distance_to_goal(res_.graph, n.symbolic);
            open.push_back({n.id, n.depth, dist, untried});
        }
        std::sort(open.begin(), open.end(),
                  [](const advisor::OpenNode& a, const advisor::OpenNode& b) {
                      return a.depth != b.depth ? a.depth < b.depth : a.node_id < b.node_id;
                  });
        return open;
    }

    // Returns the node to resume from, or -1 when the whole tree is spent.
    int backtrack(int failed) {
        std::vector<advisor::OpenNode> open = open_nodes();
        const auto& notes = tree_.nodes[static_cast<std::size_t>(failed)].failures;

        if (!notes.empty()) {
            ++res_.backtracks;
            advisor::BacktrackQuery q;
            q.current_node = failed;
            q.goal = goal_text(in_.task);
            q.tree_json = tree_to_json(tree_, in_.task);
            for (const auto& f : notes) q.feedback.push_back(f.violation.str());
            q.open = open;
            if (adv_.wants_images()) {
                q.images =
                    views_of(tree_.nodes[static_cast<std::size_t>(failed)].world.scene,
                             "current");
                auto goal_imgs = views_of(
                    goal_preview(in_.task, tree_.nodes[static_cast<std::size_t>(failed)].world),
                    "goal");
                for (auto& im : goal_imgs) q.images.push_back(std::move(im));
            }
            int reply = adv_.select_backtrack(q);
            bool valid = reply >= 0 && reply < static_cast<int>(tree_.nodes.size()) &&
                         tree_.nodes[static_cast<std::size_t>(reply)].status !=
                             NodeStatus::Exhausted;
            json open_ids = json::array();
            for (const auto& o : open) open_ids.push_back(o.node_id);
            log({{"kind", "backtrack"},
                 {"node", failed},
                 {"open", open_ids},
                 {"feedback", static_cast<int>(q.feedback.size())},
                 {"reply", reply},
                 {"valid", valid}});
            if (valid) return reply;
        }

        // Fallback: deepest resumable ancestor of the failed node, then the
        // breadth-first head of the open list.
        std::set<int> open_ids;
        for (const auto& o : open) open_ids.insert(o.node_id);
        int walk = tree_.nodes[static_cast<std::size_t>(failed)].parent;
        while (walk >= 0) {
            if (open_ids.count(walk)) return walk;
            walk = tree_.nodes[static_cast<std::size_t>(walk)].parent;
        }
        return open.empty() ? -1 : open.front().node_id;
    }

    void log(json j) { res_.advisor_log.push_back(j.dump()); }

    PlanResult finish(bool ok, const std::string& why, int goal_node) {
        res_.success = ok;
        res_.failure = ok ? "" : why;
        res_.goal_node = goal_node;
        res_.planning_time = clock_.now() - t0_;
        if (!tree_.nodes.empty()) {
            res_.root_world = tree_.nodes.front().world;
            res_.final_world = ok ? tree_.nodes[static_cast<std::size_t>(goal_node)].world
                                  : tree_.nodes.front().world;
        }
        if (ok) {
            std::vector<ActionBinding> rev;
            int walk = goal_node;
            while (walk > 0) {
                const HybridNode& n = tree_.nodes[static_cast<std::size_t>(walk)];
                rev.push_back(*n.incoming);
                walk = n.parent;
            }
            res_.plan.assign(rev.rbegin(), rev.rend());
        }
        res_.tree = std::move(tree_);
        return std::move(res_);
    }

    const PlanInputs& in_;
    PlannerConfig cfg_;
    advisor::Advisor& adv_;
    Clock& clock_;
    std::mt19937_64 rng_;
    HybridTree tree_;
    PlanResult res_;
    double t0_ = 0.0;
};

}  // namespace

PlanResult plan(const PlanInputs& in, const PlannerConfig& cfg, advisor::Advisor& adv,
                Clock* clock) {
    WallClock wall;
    Planner p(in, cfg, adv, clock ? *clock : static_cast<Clock&>(wall));
    return p.run();
}

void write_plan_file(const std::string& path, const PlanInputs& in, const PlannerConfig& cfg,
                     const PlanResult& res) {
    json steps = json::array();
    for (const auto& b : res.plan) {
        json wps = json::array();
        for (const auto& w : b.trajectory.waypoints) wps.push_back(config_json(w));
        steps.push_back({{"action", b.action},
                         {"ee_goal", pose_json(b.ee_goal)},
                         {"start_config", config_json(b.start_config)},
                         {"goal_config", config_json(b.goal_config)},
                         {"waypoints", wps}});
    }
    json goal = json::array();
    for (int id : in.task.goal_ids) goal.push_back(in.task.atoms.atom(id).str());
    json j{{"version", 1},
           {"domain", pddl::emit_domain(in.task.domain)},
           {"problem", pddl::emit_problem(in.task.problem)},
           {"seed", cfg.seed},
           {"robot_base", pose_json(in.robot.base_pose)},
           {"sim", sim_json(in.sim)},
           {"goal", goal},
           {"root", world_json(res.root_world)},
           {"steps", steps}};
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << j.dump(1) << "\n";
}

ReplayResult replay_plan_file(const std::string& path) {
    ReplayResult out;
    json j;
    try {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + path);
        f >> j;
        pddl::DomainDef dom = pddl::parse_domain(j.at("domain").get<std::string>());
        pddl::ProblemDef prob = pddl::parse_problem(j.at("problem").get<std::string>(), dom);
        pddl::Task task = pddl::Task::make(std::move(dom), std::move(prob));
        robot::RobotModel robot = robot::RobotModel::standard();
        robot.base_pose = pose_from(j.at("robot_base"));
        sim::SimParams sp = sim_from(j.at("sim"));

        std::map<std::string, const pddl::GroundAction*> by_name;
        for (const auto& a : task.actions) by_name[a.name] = &a;

        sim::WorldState w = world_from(j.at("root"));
        for (const auto& js : j.at("steps")) {
            std::string name = js.at("action").get<std::string>();
            auto it = by_name.find(name);
            if (it == by_name.end()) throw std::runtime_error("unknown action " + name);
            motion::Trajectory traj;
            for (const auto& wp : js.at("waypoints")) traj.waypoints.push_back(config_from(wp));
            sim::ExecResult exec = sim::execute(robot, task, w, *it->second, traj, sp);
            if (!exec.ok) {
                out.error = name + ": " + exec.violation;
                out.final_world = std::move(exec.world);
                return out;
            }
            w = std::move(exec.world);
            ++out.steps;
        }
        pddl::SymbolicState final_sym = sim::evaluate_predicates(task, w, sp);
        out.goal_satisfied = final_sym.superset_of(task.goal_ids);
        out.final_world = std::move(w);
        out.ok = true;
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
    }
    return out;
}

void write_run_outputs(const std::string& dir, const PlanInputs& in, const PlannerConfig& cfg,
                       const PlanResult& res) {
    namespace fs = std::filesystem;
    fs::create_directories(dir + "/images");

    auto put = [&](const std::string& name, const std::string& body) {
        std::ofstream f(dir + "/" + name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + dir + "/" + name);
        f << body;
    };
    put("tree.json", tree_to_json(res.tree, in.task) + "\n");
    put("graph.dot", dgraph::to_dot(res.graph, in.task));
    put("sas_plans.txt", topk::dump_plans(in.task, res.topk));
    std::string log;
    for (const auto& line : res.advisor_log) log += line + "\n";
    put("advisor_log.jsonl", log);

    auto dump_views = [&](const geom::Scene& sc, const std::string& stem) {
        auto imgs = render::render_all(sc, 256, 256);
        for (int v = 0; v < 4; ++v) {
            render::write_png(dir + "/images/" + stem + "_" +
                                  render::view_name(static_cast<render::View>(v)) + ".png",
                              imgs[static_cast<std::size_t>(v)]);
        }
    };
    dump_views(res.root_world.scene, "root");
    if (res.success) {
        dump_views(res.final_world.scene, "final");
        write_plan_file(dir + "/plan.json", in, cfg, res);
    }
}

std::string scene_to_json(const geom::Scene& scene) { return scene_json(scene).dump(1); }

geom::Scene scene_from_json(const std::string& text) {
    try {
        return scene_from(json::parse(text));
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("bad scene json: ") + e.what());
    }
}

}  // namespace tamp::hybrid
