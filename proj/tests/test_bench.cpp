#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>

#include "tamp/bench.hpp"
#include "tamp/geom.hpp"
#include "tamp/pddl.hpp"
#include "tamp/sim.hpp"
#include "tamp/topk.hpp"

using namespace tamp;

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

pddl::Task parse_instance(const bench::Instance& inst) {
    auto d = pddl::parse_domain(inst.domain_text);
    auto p = pddl::parse_problem(inst.problem_text, d);
    return pddl::Task::make(std::move(d), std::move(p));
}

int count_pred(const pddl::Task& task, const std::vector<int>& ids, const std::string& pred) {
    int n = 0;
    for (int id : ids)
        if (task.atoms.atom(id).pred == pred) ++n;
    return n;
}

}  // namespace

TEST_CASE("generators are deterministic per seed") {
    auto a = bench::gen_blocksworld(4, 17);
    auto b = bench::gen_blocksworld(4, 17);
    CHECK(a.problem_text == b.problem_text);
    REQUIRE(a.scene.objects.size() == b.scene.objects.size());
    for (const auto& [id, obj] : a.scene.objects) {
        const auto& other = b.scene.objects.at(id);
        CHECK(obj.pose.position.x == other.pose.position.x);
        CHECK(obj.pose.position.y == other.pose.position.y);
        CHECK(obj.pose.position.z == other.pose.position.z);
    }
    auto c = bench::gen_blocksworld(4, 18);
    CHECK(a.problem_text != c.problem_text);

    auto k1 = bench::gen_kitchen(3, 9);
    auto k2 = bench::gen_kitchen(3, 9);
    CHECK(k1.problem_text == k2.problem_text);
    CHECK(k1.scene.objects.at("egg").pose.position.x ==
          k2.scene.objects.at("egg").pose.position.x);
}

TEST_CASE("blocksworld instances stack 2-3 columns and ask for something new") {
    for (std::uint64_t seed : {0, 1, 2, 3, 4}) {
        auto inst = bench::gen_blocksworld(3, seed);
        auto task = parse_instance(inst);

        int init_bases = 0;
        std::set<std::string> init_on;
        for (const auto& atom : task.problem.init) {
            if (atom.pred == "on-table") ++init_bases;
            if (atom.pred == "on" || atom.pred == "on-table") init_on.insert(atom.str());
        }
        CHECK(init_bases >= 2);
        CHECK(init_bases <= 3);

        // Every block has exactly one resting atom and the tops are clear.
        CHECK(count_pred(task, task.goal_ids, "on") + count_pred(task, task.goal_ids, "on-table")
              == 3);
        std::set<std::string> goal_on;
        for (int id : task.goal_ids) goal_on.insert(task.atoms.atom(id).str());
        CHECK(goal_on != init_on);

        // The scene realizes the stacking: block count plus the table.
        CHECK(inst.scene.objects.size() == 4);
    }
}

TEST_CASE("generated instances are symbolically solvable") {
    for (int n = 2; n <= 6; ++n) {
        for (std::uint64_t seed = 0; seed < (n == 3 ? 60u : 10u); ++seed) {
            auto task = parse_instance(bench::gen_blocksworld(n, seed));
            auto tk = topk::solve_topk(task, 1);
            REQUIRE(tk.plans.size() == 1);
            CHECK(tk.plans[0].cost >= 2);
        }
    }
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto task = parse_instance(bench::gen_kitchen(2, seed));
        auto tk = topk::solve_topk(task, 1);
        REQUIRE(tk.plans.size() == 1);
        CHECK(tk.plans[0].cost >= 6);
    }
}

TEST_CASE("kitchen instances match the documented layout") {
    auto inst = bench::gen_kitchen(3, 0);
    auto task = parse_instance(inst);

    CHECK(count_pred(task, task.goal_ids, "cooked") == 3);
    CHECK(static_cast<int>(task.goal_ids.size()) == 3);

    int foods = 0, posts = 0;
    for (const auto& [id, obj] : inst.scene.objects) {
        if (id.rfind("post", 0) == 0) {
            ++posts;
            CHECK(obj.fixed);
            CHECK(obj.color == geom::Rgb{130, 130, 130});
        }
        if (!obj.fixed) ++foods;
    }
    CHECK(foods == 6);
    CHECK(posts == 12);
    CHECK(inst.scene.objects.at("sink").half_extents.x == 0.06);
    CHECK(inst.scene.objects.at("stove").half_extents.y == 0.06);
    CHECK(inst.scene.regions.size() == 4);
}

TEST_CASE("kitchen scenes settle in place with no contact") {
    sim::SimParams params;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto inst = bench::gen_kitchen(1 + seed % 6, seed);
        auto settled = sim::settle(inst.scene, {}, params);
        CHECK(settled.displacement < 1e-9);
        CHECK(geom::scene_in_collision(inst.scene, {}, 0.0).empty());
    }
}

TEST_CASE("an empty suite is a bare header") {
    bench::SuiteSpec spec;
    auto rows = bench::run_suite(spec);
    CHECK(rows.empty());
    CHECK(bench::to_csv(rows) == bench::csv_header() + "\n");
}

TEST_CASE("the suite runs, records, and stays reproducible") {
    fs::path dir_a = fresh_dir("tamp_bench_a");
    fs::path dir_b = fresh_dir("tamp_bench_b");

    bench::SuiteSpec spec;
    spec.instances = {{bench::Domain::Blocksworld, 3, 0}, {bench::Domain::Blocksworld, 3, 1}};
    spec.advisors.emplace_back("heuristic",
                               [] { return std::make_unique<advisor::HeuristicAdvisor>(); });
    spec.config.timeout_s = 120.0;
    spec.logical_clock = true;
    spec.out_dir = dir_a.string();

    auto rows = bench::run_suite(spec);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.advisor == "heuristic");
        CHECK(r.planning_time <= spec.config.timeout_s + 5.0);
        if (r.success) {
            REQUIRE_FALSE(r.plan_file.empty());
            auto replay = hybrid::replay_plan_file((dir_a / r.plan_file).string());
            CHECK(replay.ok);
            CHECK(replay.goal_satisfied);
        } else {
            CHECK(r.plan_file.empty());
            CHECK_FALSE(r.failure.empty());
        }
    }

    // Aggregates are a pure function of the rows.
    int wins = 0;
    for (const auto& r : rows) wins += r.success ? 1 : 0;
    auto table = bench::summary_table(rows);
    CHECK(table.find("blocksworld") != std::string::npos);
    CHECK(table.find(std::to_string(wins) + "/2") != std::string::npos);

    // Same spec, different directory: byte-identical rows.
    spec.out_dir = dir_b.string();
    auto again = bench::run_suite(spec);
    CHECK(bench::to_csv(rows) == bench::to_csv(again));
}

TEST_CASE("a crashing run becomes a failure row and the suite goes on") {
    bench::SuiteSpec spec;
    spec.instances = {{bench::Domain::Blocksworld, 3, 0}};
    spec.advisors.emplace_back("throwing", []() -> std::unique_ptr<advisor::Advisor> {
        throw std::runtime_error("advisor exploded");
    });
    spec.advisors.emplace_back("heuristic",
                               [] { return std::make_unique<advisor::HeuristicAdvisor>(); });
    spec.logical_clock = true;

    auto rows = bench::run_suite(spec);
    REQUIRE(rows.size() == 2);
    CHECK_FALSE(rows[0].success);
    CHECK(rows[0].failure.find("crash") != std::string::npos);
    CHECK(rows[0].failure.find("exploded") != std::string::npos);
    CHECK(rows[1].advisor == "heuristic");
}

TEST_CASE("size bounds are enforced") {
    CHECK_THROWS(bench::gen_blocksworld(1, 0));
    CHECK_THROWS(bench::gen_blocksworld(9, 0));
    CHECK_THROWS(bench::gen_kitchen(0, 0));
    CHECK_THROWS(bench::gen_kitchen(7, 0));
}
