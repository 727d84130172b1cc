#include "tamp/bench.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tamp/domains.hpp"
#include "tamp/pddl.hpp"

namespace tamp::bench {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::pair<const char*, geom::Rgb>, 8> kBlockPalette = {{
    {"red", {200, 60, 50}},
    {"green", {70, 160, 70}},
    {"blue", {60, 90, 200}},
    {"yellow", {220, 190, 60}},
    {"magenta", {170, 80, 170}},
    {"cyan", {70, 170, 180}},
    {"orange", {230, 140, 50}},
    {"purple", {120, 70, 160}},
}};

constexpr std::array<std::pair<const char*, geom::Rgb>, 6> kFoods = {{
    {"radish", {185, 70, 120}},
    {"egg", {235, 230, 210}},
    {"bacon", {205, 115, 110}},
    {"chicken", {230, 200, 140}},
    {"celery", {120, 190, 90}},
    {"apple", {200, 45, 45}},
}};

geom::Scene desk_scene() {
    geom::Scene sc;
    geom::BoxObject table;
    table.id = "table";
    table.half_extents = {0.30, 0.30, 0.02};
    table.pose.position = {0.0, 0.0, -0.02};
    table.fixed = true;
    table.color = {150, 120, 90};
    sc.objects["table"] = table;
    sc.regions.push_back({"table", "table"});
    sc.bounds = {{-0.55, -0.55, -0.30}, {0.55, 0.55, 1.20}};
    return sc;
}

void add_box(geom::Scene& sc, const std::string& id, geom::Vec3 half, geom::Vec3 center,
             geom::Rgb color, bool fixed) {
    geom::BoxObject b;
    b.id = id;
    b.half_extents = half;
    b.pose.position = center;
    b.color = color;
    b.fixed = fixed;
    sc.objects[id] = b;
}

double jitter(std::mt19937_64& rng, double r) {
    return std::uniform_real_distribution<double>(-r, r)(rng);
}

// Shuffled blocks cut into `stacks` nonempty columns, bottom first.
std::vector<std::vector<int>> deal_stacks(int n, int stacks, std::mt19937_64& rng) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> cuts(n - 1);
    std::iota(cuts.begin(), cuts.end(), 1);
    std::shuffle(cuts.begin(), cuts.end(), rng);
    cuts.resize(stacks - 1);
    cuts.push_back(0);
    cuts.push_back(n);
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::vector<int>> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        out.emplace_back(order.begin() + cuts[i], order.begin() + cuts[i + 1]);
    return out;
}

// The on/on-table atoms pinning an arrangement; stack order is irrelevant.
std::set<std::string> arrangement_atoms(const std::vector<std::vector<int>>& stacks) {
    std::set<std::string> out;
    for (const auto& st : stacks) {
        out.insert("(on-table " + std::string(kBlockPalette[st[0]].first) + ")");
        for (std::size_t i = 1; i < st.size(); ++i)
            out.insert("(on " + std::string(kBlockPalette[st[i]].first) + " " +
                       kBlockPalette[st[i - 1]].first + ")");
    }
    return out;
}

std::string joined(const std::set<std::string>& atoms) {
    std::string out;
    for (const auto& a : atoms) out += (out.empty() ? "" : " ") + a;
    return out;
}

}  // namespace

std::string domain_name(Domain d) {
    return d == Domain::Blocksworld ? "blocksworld" : "kitchen";
}

robot::RobotModel front_robot() {
    robot::RobotModel m = robot::RobotModel::standard();
    m.base_pose = {{0.0, -0.26, 0.0}, M_PI / 2};
    return m;
}

Instance gen_blocksworld(int n, std::uint64_t seed) {
    if (n < 2 || n > static_cast<int>(kBlockPalette.size()))
        throw std::invalid_argument("blocksworld size must be in [2, 8]");
    std::mt19937_64 rng(seed);

    int init_stacks = n == 2 ? 2 : 2 + static_cast<int>(rng() % 2);
    auto init = deal_stacks(n, init_stacks, rng);
    auto init_atoms = arrangement_atoms(init);

    std::vector<std::vector<int>> goal;
    std::set<std::string> goal_atoms;
    do {
        int goal_stacks = 1 + static_cast<int>(rng() % std::min(n, 3));
        goal = deal_stacks(n, goal_stacks, rng);
        goal_atoms = arrangement_atoms(goal);
    } while (goal_atoms == init_atoms);

    std::set<std::string> full_init = init_atoms;
    for (const auto& st : init)
        full_init.insert("(clear " + std::string(kBlockPalette[st.back()].first) + ")");
    full_init.insert("(arm-empty)");

    std::string names;
    for (int i = 0; i < n; ++i) names += (i ? " " : "") + std::string(kBlockPalette[i].first);

    Instance out;
    out.domain_text = domains::kBlocksworld;
    out.problem_text = "(define (problem blocksworld_n" + std::to_string(n) + "_s" +
                       std::to_string(seed) + ")\n  (:domain blocksworld)\n  (:objects " + names +
                       " - block)\n  (:init " + joined(full_init) + ")\n  (:goal (and " +
                       joined(goal_atoms) + ")))";
    out.scene = desk_scene();
    out.robot = front_robot();

    const double slot[3] = {-0.15, 0.0, 0.15};
    for (std::size_t s = 0; s < init.size(); ++s) {
        double bx = slot[s] + jitter(rng, 0.02);
        double by = 0.12 + jitter(rng, 0.04);
        for (std::size_t i = 0; i < init[s].size(); ++i) {
            const auto& [name, color] = kBlockPalette[init[s][i]];
            add_box(out.scene, name, {0.02, 0.02, 0.02}, {bx, by, 0.02 + 0.04 * i}, color, false);
        }
    }
    return out;
}

Instance gen_kitchen(int n, std::uint64_t seed) {
    if (n < 1 || n > static_cast<int>(kFoods.size()))
        throw std::invalid_argument("kitchen goal size must be in [1, 6]");
    std::mt19937_64 rng(seed);

    Instance out;
    out.domain_text = domains::kKitchen;
    out.scene = desk_scene();
    out.robot = front_robot();
    add_box(out.scene, "sink", {0.06, 0.06, 0.002}, {-0.20, 0.16, 0.002}, {190, 50, 50}, true);
    add_box(out.scene, "stove", {0.06, 0.06, 0.002}, {0.20, 0.16, 0.002}, {60, 80, 200}, true);
    out.scene.regions.push_back({"sink", "sink"});
    out.scene.regions.push_back({"stove", "stove"});
    out.scene.regions.push_back({"counter", "counter"});

    // Foods land on shuffled counter slots in front of the pads.
    std::vector<int> slots(kFoods.size());
    std::iota(slots.begin(), slots.end(), 0);
    std::shuffle(slots.begin(), slots.end(), rng);
    for (std::size_t f = 0; f < kFoods.size(); ++f) {
        const auto& [name, color] = kFoods[f];
        double x = -0.20 + 0.08 * slots[f] + jitter(rng, 0.015);
        double y = -0.02 + jitter(rng, 0.04);
        add_box(out.scene, name, {0.02, 0.02, 0.02}, {x, y, 0.02}, color, false);
    }

    // A fence of distractor pillars hems the counter strip in.
    const std::array<std::pair<double, double>, 12> posts = {{
        {-0.24, -0.14},
        {-0.12, -0.14},
        {0.0, -0.14},
        {0.12, -0.14},
        {0.24, -0.14},
        {-0.27, -0.04},
        {0.27, -0.04},
        {-0.27, 0.04},
        {0.27, 0.04},
        {-0.06, 0.16},
        {0.06, 0.16},
        {0.0, 0.24},
    }};
    for (std::size_t i = 0; i < posts.size(); ++i) {
        add_box(out.scene, "post" + std::to_string(i + 1), {0.015, 0.015, 0.03},
                {posts[i].first + jitter(rng, 0.008), posts[i].second + jitter(rng, 0.008), 0.03},
                {130, 130, 130}, true);
    }

    std::vector<int> pick(kFoods.size());
    std::iota(pick.begin(), pick.end(), 0);
    std::shuffle(pick.begin(), pick.end(), rng);
    pick.resize(n);
    std::set<std::string> goal_atoms;
    for (int f : pick) goal_atoms.insert("(cooked " + std::string(kFoods[f].first) + ")");

    std::string food_names, init;
    for (const auto& [name, color] : kFoods) {
        food_names += (food_names.empty() ? "" : " ") + std::string(name);
        init += std::string(init.empty() ? "" : " ") + "(at " + name + " counter)";
    }
    init += " (is-sink sink) (is-stove stove) (arm-empty)";

    out.problem_text = "(define (problem kitchen_n" + std::to_string(n) + "_s" +
                       std::to_string(seed) + ")\n  (:domain kitchen)\n  (:objects " + food_names +
                       " - food sink stove counter - region)\n  (:init " + init +
                       ")\n  (:goal (and " + joined(goal_atoms) + ")))";
    return out;
}

Instance gen_instance(const InstanceSpec& spec) {
    return spec.domain == Domain::Blocksworld ? gen_blocksworld(spec.n, spec.seed)
                                              : gen_kitchen(spec.n, spec.seed);
}

std::string csv_header() {
    return "domain,n,seed,advisor,success,planning_time,expansions,backtracks,retries,plan_file";
}

std::string csv_row(const RunRecord& r) {
    char time_buf[32];
    std::snprintf(time_buf, sizeof time_buf, "%.3f", r.planning_time);
    return domain_name(r.instance.domain) + "," + std::to_string(r.instance.n) + "," +
           std::to_string(r.instance.seed) + "," + r.advisor + "," + (r.success ? "1" : "0") +
           "," + time_buf + "," + std::to_string(r.expansions) + "," +
           std::to_string(r.backtracks) + "," + std::to_string(r.retries) + "," + r.plan_file;
}

std::string to_csv(const std::vector<RunRecord>& rows) {
    std::string out = csv_header() + "\n";
    for (const auto& r : rows) out += csv_row(r) + "\n";
    return out;
}

namespace {

std::string run_dir_name(const InstanceSpec& inst, const std::string& advisor) {
    return domain_name(inst.domain) + "_n" + std::to_string(inst.n) + "_s" +
           std::to_string(inst.seed) + "_" + advisor;
}

RunRecord run_one(const SuiteSpec& spec, const InstanceSpec& inst, const std::string& name,
                  const AdvisorFactory& make) {
    RunRecord rec;
    rec.instance = inst;
    rec.advisor = name;
    try {
        Instance gi = gen_instance(inst);
        auto d = pddl::parse_domain(gi.domain_text);
        auto p = pddl::parse_problem(gi.problem_text, d);
        hybrid::PlanInputs in;
        in.task = pddl::Task::make(std::move(d), std::move(p));
        in.scene = gi.scene;
        in.robot = gi.robot;
        hybrid::PlannerConfig cfg = spec.config;
        cfg.seed = inst.seed;
        auto adv = make();
        std::unique_ptr<hybrid::Clock> clock;
        if (spec.logical_clock) clock = std::make_unique<hybrid::SteppedClock>();
        auto res = hybrid::plan(in, cfg, *adv, clock.get());
        rec.success = res.success;
        rec.planning_time = res.planning_time;
        rec.expansions = res.expansions;
        rec.backtracks = res.backtracks;
        rec.retries = res.retries;
        rec.failure = res.failure;
        if (res.success && !spec.out_dir.empty()) {
            std::string rel = run_dir_name(inst, name);
            fs::create_directories(fs::path(spec.out_dir) / rel);
            rec.plan_file = rel + "/plan.json";
            hybrid::write_plan_file((fs::path(spec.out_dir) / rec.plan_file).string(), in, cfg,
                                    res);
        }
    } catch (const std::exception& e) {
        rec.success = false;
        rec.failure = std::string("crash: ") + e.what();
    }
    return rec;
}

}  // namespace

std::vector<RunRecord> run_suite(const SuiteSpec& spec) {
    struct Unit {
        const InstanceSpec* inst;
        const std::pair<std::string, AdvisorFactory>* adv;
    };
    std::vector<Unit> units;
    for (const auto& inst : spec.instances)
        for (const auto& adv : spec.advisors) units.push_back({&inst, &adv});

    std::vector<RunRecord> rows(units.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t u; (u = next.fetch_add(1)) < units.size();)
            rows[u] = run_one(spec, *units[u].inst, units[u].adv->first, units[u].adv->second);
    };

    int jobs = std::clamp<int>(spec.jobs, 1, std::max<int>(1, units.size()));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return rows;
}

std::string summary_table(const std::vector<RunRecord>& rows) {
    struct Agg {
        int runs = 0, wins = 0;
        double win_time = 0.0;
    };
    std::map<std::tuple<std::string, int, std::string>, Agg> groups;
    for (const auto& r : rows) {
        Agg& a = groups[{domain_name(r.instance.domain), r.instance.n, r.advisor}];
        ++a.runs;
        if (r.success) {
            ++a.wins;
            a.win_time += r.planning_time;
        }
    }

    std::ostringstream out;
    out << std::left << std::setw(13) << "domain" << std::right << std::setw(3) << "n" << "  "
        << std::left << std::setw(12) << "advisor" << std::right << std::setw(9) << "success"
        << std::setw(8) << "rate" << std::setw(13) << "mean-time-s" << "\n";
    for (const auto& [key, a] : groups) {
        const auto& [domain, n, advisor] = key;
        char rate[16], mean[16];
        std::snprintf(rate, sizeof rate, "%.0f%%", a.runs ? 100.0 * a.wins / a.runs : 0.0);
        if (a.wins)
            std::snprintf(mean, sizeof mean, "%.3f", a.win_time / a.wins);
        else
            std::snprintf(mean, sizeof mean, "-");
        out << std::left << std::setw(13) << domain << std::right << std::setw(3) << n << "  "
            << std::left << std::setw(12) << advisor << std::right << std::setw(5) << a.wins
            << "/" << std::left << std::setw(3) << a.runs << std::right << std::setw(8) << rate
            << std::setw(13) << mean << "\n";
    }
    return out.str();
}

}  // namespace tamp::bench
