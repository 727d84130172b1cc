// Command-line front end. Talks to the planner exclusively through the C API
// so the shared library stays the single supported integration surface.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tamp.h"

namespace {

using json = nlohmann::ordered_json;

int run(tamp_status (*call)(const char*, tamp_result**), const json& request, bool quiet) {
    tamp_result* res = nullptr;
    tamp_status s = call(request.dump().c_str(), &res);
    const char* body = tamp_result_json(res);
    if (body && !quiet) std::printf("%s\n", body);
    if (s != TAMP_OK)
        std::fprintf(stderr, "error (%s): %s\n", tamp_status_name(s), tamp_result_error(res));
    tamp_result_free(res);
    return s == TAMP_OK ? 0 : 1;
}

struct ConfigFlags {
    json j = json::object();

    void attach(CLI::App* cmd) {
        auto opt = [&](const char* flag, const char* key, const char* help) {
            cmd->add_option_function<double>(
                   flag, [this, key = std::string(key)](double v) { j[key] = v; }, help)
                ->group("Planner");
        };
        opt("--seed", "seed", "deterministic run seed");
        opt("--k", "k", "symbolic plans fused into the action graph");
        opt("--retries", "retries", "expansion retries before backtracking");
        opt("--timeout", "timeout_s", "planning budget in seconds");
        opt("--rrt-iters", "rrt_max_iters", "RRT-Connect iteration cap");
        opt("--samples", "samples_per_action", "placement draws per refinement");
        opt("--margin", "margin", "motion clearance in meters");
        opt("--image-size", "image_size", "advisor image resolution");
    }

    json take() {
        // Integer-valued knobs arrive as doubles from the flag parser.
        for (auto& [key, v] : j.items())
            if (key != "margin" && key != "timeout_s") v = static_cast<long long>(v.get<double>());
        return j;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("task-and-motion planner (") + tamp_version() + ")"};
    app.require_subcommand(1);

    // plan
    std::string domain, problem, scene, advisor = "heuristic", out_dir, record;
    bool logical = false, quiet = false;
    ConfigFlags plan_cfg;
    auto* plan = app.add_subcommand("plan", "plan one problem and write run artifacts");
    plan->add_option("--domain", domain, "domain pddl file")->required();
    plan->add_option("--problem", problem, "problem pddl file")->required();
    plan->add_option("--scene", scene, "scene json file")->required();
    plan->add_option("--advisor", advisor,
                     "heuristic, scripted:FILE, remote:URL, or replay:FILE");
    plan->add_option("--out", out_dir, "directory for tree, plan, log, and images");
    plan->add_option("--record", record, "cassette file capturing remote advisor traffic");
    plan->add_flag("--logical-clock", logical, "stepped time for reproducible outputs");
    plan->add_flag("--quiet", quiet, "suppress the result json");
    plan_cfg.attach(plan);

    // replay
    std::string plan_file;
    auto* replay = app.add_subcommand("replay", "re-execute a plan file and check its goal");
    replay->add_option("plan", plan_file, "plan json file")->required();

    // gen
    std::string gen_domain = "blocksworld", gen_out;
    int gen_n = 3;
    long long gen_seed = 0;
    auto* gen = app.add_subcommand("gen", "generate a benchmark instance");
    gen->add_option("--domain", gen_domain, "blocksworld or kitchen");
    gen->add_option("--n", gen_n, "blocks, or foods to cook");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "directory for domain.pddl, problem.pddl, scene.json");

    // bench
    std::vector<std::string> bench_domains, bench_advisors;
    int n_min = 3, n_max = -1, instances = 10, jobs = 1;
    long long seed_base = 0;
    std::string bench_out;
    bool bench_logical = false;
    ConfigFlags bench_cfg;
    auto* bench = app.add_subcommand("bench", "run a seeded experiment suite");
    bench->add_option("--domain", bench_domains, "domains to sweep (repeatable)");
    bench->add_option("--n-min", n_min, "smallest instance size");
    bench->add_option("--n-max", n_max, "largest instance size (default n-min)");
    bench->add_option("--instances", instances, "instances per size");
    bench->add_option("--seed-base", seed_base, "first instance seed");
    bench->add_option("--advisor", bench_advisors, "advisors to compare (repeatable)");
    bench->add_option("--jobs", jobs, "parallel planner workers");
    bench->add_option("--out", bench_out, "directory for results.csv and plan files");
    bench->add_flag("--logical-clock", bench_logical, "stepped time for reproducible rows");
    bench_cfg.attach(bench);

    CLI11_PARSE(app, argc, argv);

    if (plan->parsed()) {
        json req{{"domain_file", domain}, {"problem_file", problem}, {"scene_file", scene},
                 {"advisor", advisor},    {"logical_clock", logical}};
        if (!out_dir.empty()) req["out_dir"] = out_dir;
        if (!record.empty()) req["record"] = record;
        req["config"] = plan_cfg.take();
        return run(tamp_plan_run, req, quiet);
    }
    if (replay->parsed()) {
        tamp_result* res = nullptr;
        tamp_status s = tamp_replay_run(plan_file.c_str(), &res);
        if (const char* body = tamp_result_json(res)) std::printf("%s\n", body);
        if (s != TAMP_OK)
            std::fprintf(stderr, "error (%s): %s\n", tamp_status_name(s),
                         tamp_result_error(res));
        tamp_result_free(res);
        return s == TAMP_OK ? 0 : 1;
    }
    if (gen->parsed()) {
        json req{{"domain", gen_domain}, {"n", gen_n}, {"seed", gen_seed}};
        if (!gen_out.empty()) req["out_dir"] = gen_out;
        return run(tamp_gen_instance, req, false);
    }
    if (bench->parsed()) {
        json req{{"n_min", n_min},
                 {"n_max", n_max < 0 ? n_min : n_max},
                 {"instances", instances},
                 {"seed_base", seed_base},
                 {"jobs", jobs},
                 {"logical_clock", bench_logical}};
        if (!bench_domains.empty()) req["domains"] = bench_domains;
        if (!bench_advisors.empty()) req["advisors"] = bench_advisors;
        if (!bench_out.empty()) req["out_dir"] = bench_out;
        req["config"] = bench_cfg.take();

        tamp_result* res = nullptr;
        tamp_status s = tamp_bench_run(req.dump().c_str(), &res);
        if (s == TAMP_OK) {
            json body = json::parse(tamp_result_json(res));
            std::printf("%s", body.at("summary").get<std::string>().c_str());
            std::printf("%zu rows", static_cast<std::size_t>(body.at("rows").get<int>()));
            if (!body.at("csv_file").get<std::string>().empty())
                std::printf(" -> %s", body.at("csv_file").get<std::string>().c_str());
            std::printf("\n");
        } else {
            std::fprintf(stderr, "error (%s): %s\n", tamp_status_name(s),
                         tamp_result_error(res));
        }
        tamp_result_free(res);
        return s == TAMP_OK ? 0 : 1;
    }
    return 1;
}
