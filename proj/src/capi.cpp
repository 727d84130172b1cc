#include "tamp.h"

#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "tamp/advisor.hpp"
#include "tamp/bench.hpp"
#include "tamp/hybrid.hpp"
#include "tamp/pddl.hpp"

struct tamp_result {
    std::string json;
    std::string error;
};

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace tamp;

// Parse failures of the request document itself.
struct BadRequest : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Domain, problem, scene, or plan file contents rejected.
struct BadInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void spill(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    f << body;
}

tamp_status finish(tamp_result** out, tamp_status s, std::string body, std::string error) {
    if (out) {
        auto* r = new tamp_result;
        r->json = std::move(body);
        r->error = std::move(error);
        *out = r;
    }
    return s;
}

template <typename Fn>
tamp_status guarded(tamp_result** out, Fn&& fn) {
    if (out) *out = nullptr;
    try {
        return fn();
    } catch (const BadRequest& e) {
        return finish(out, TAMP_ERR_INVALID_ARGUMENT, "", e.what());
    } catch (const IoError& e) {
        return finish(out, TAMP_ERR_IO, "", e.what());
    } catch (const BadInput& e) {
        return finish(out, TAMP_ERR_PARSE, "", e.what());
    } catch (const std::exception& e) {
        return finish(out, TAMP_ERR_INTERNAL, "", e.what());
    } catch (...) {
        return finish(out, TAMP_ERR_INTERNAL, "", "unknown failure");
    }
}

json parse_request(const char* request_json) {
    if (!request_json) throw BadRequest("request is null");
    try {
        return json::parse(request_json);
    } catch (const json::exception& e) {
        throw BadRequest(std::string("request is not valid json: ") + e.what());
    }
}

// "field" inline or "field_file" on disk; exactly the inline one wins.
std::string text_of(const json& req, const std::string& field) {
    if (req.contains(field + "_text")) return req.at(field + "_text").get<std::string>();
    if (req.contains(field + "_file")) return slurp(req.at(field + "_file").get<std::string>());
    throw BadRequest("request needs " + field + "_text or " + field + "_file");
}

hybrid::PlannerConfig config_of(const json& req) {
    hybrid::PlannerConfig cfg;
    if (!req.contains("config")) return cfg;
    const json& j = req.at("config");
    cfg.k = j.value("k", cfg.k);
    cfg.retries = j.value("retries", cfg.retries);
    cfg.timeout_s = j.value("timeout_s", cfg.timeout_s);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.rrt_max_iters = j.value("rrt_max_iters", cfg.rrt_max_iters);
    cfg.samples_per_action = j.value("samples_per_action", cfg.samples_per_action);
    cfg.ik_attempts = j.value("ik_attempts", cfg.ik_attempts);
    cfg.node_budget = j.value("node_budget", cfg.node_budget);
    cfg.root_sample_budget = j.value("root_sample_budget", cfg.root_sample_budget);
    cfg.margin = j.value("margin", cfg.margin);
    cfg.image_size = j.value("image_size", cfg.image_size);
    return cfg;
}

std::unique_ptr<advisor::Advisor> make_advisor(const std::string& spec,
                                               const std::string& record) {
    auto arg_of = [&](const char* prefix) -> std::optional<std::string> {
        std::string p(prefix);
        if (spec.rfind(p, 0) == 0 && spec.size() > p.size()) return spec.substr(p.size());
        return std::nullopt;
    };
    if (spec == "heuristic") return std::make_unique<advisor::HeuristicAdvisor>();
    if (auto file = arg_of("scripted:")) {
        json j;
        try {
            j = json::parse(slurp(*file));
        } catch (const json::exception& e) {
            throw BadInput("script " + *file + " is not a json array: " + e.what());
        }
        if (!j.is_array()) throw BadInput("script " + *file + " must be a json array of ids");
        return std::make_unique<advisor::ScriptedAdvisor>(j.get<std::vector<int>>());
    }
    if (auto url = arg_of("remote:")) {
        std::unique_ptr<advisor::ChatTransport> t =
            std::make_unique<advisor::HttpTransport>(*url);
        if (!record.empty()) t = advisor::CassetteTransport::record(record, std::move(t));
        return std::make_unique<advisor::RemoteAdvisor>(std::move(t));
    }
    if (auto file = arg_of("replay:"))
        return std::make_unique<advisor::RemoteAdvisor>(advisor::CassetteTransport::replay(*file));
    throw BadRequest("unknown advisor '" + spec +
                     "' (expected heuristic, scripted:FILE, remote:URL, or replay:FILE)");
}

hybrid::PlanInputs inputs_of(const json& req) {
    hybrid::PlanInputs in;
    try {
        auto dom = pddl::parse_domain(text_of(req, "domain"));
        auto prob = pddl::parse_problem(text_of(req, "problem"), dom);
        in.task = pddl::Task::make(std::move(dom), std::move(prob));
    } catch (const IoError&) {
        throw;
    } catch (const BadRequest&) {
        throw;
    } catch (const std::exception& e) {
        throw BadInput(e.what());
    }
    try {
        if (req.contains("scene"))
            in.scene = hybrid::scene_from_json(req.at("scene").dump());
        else
            in.scene = hybrid::scene_from_json(slurp(req.at("scene_file").get<std::string>()));
    } catch (const json::exception&) {
        throw BadRequest("request needs scene or scene_file");
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& e) {
        throw BadInput(e.what());
    }
    in.robot = bench::front_robot();
    if (req.contains("robot")) {
        const json& r = req.at("robot");
        if (r.contains("base_position")) {
            auto v = r.at("base_position").get<std::vector<double>>();
            if (v.size() != 3) throw BadRequest("robot.base_position needs three numbers");
            in.robot.base_pose.position = {v[0], v[1], v[2]};
        }
        in.robot.base_pose.yaw = r.value("base_yaw", in.robot.base_pose.yaw);
    }
    return in;
}

bench::Domain domain_of(const std::string& name) {
    if (name == "blocksworld") return bench::Domain::Blocksworld;
    if (name == "kitchen") return bench::Domain::Kitchen;
    throw BadRequest("unknown domain '" + name + "'");
}

}  // namespace

extern "C" {

const char* tamp_result_json(const tamp_result* r) {
    return r && !r->json.empty() ? r->json.c_str() : nullptr;
}

const char* tamp_result_error(const tamp_result* r) { return r ? r->error.c_str() : ""; }

void tamp_result_free(tamp_result* r) { delete r; }

tamp_status tamp_plan_run(const char* request_json, tamp_result** out) {
    return guarded(out, [&] {
        json req = parse_request(request_json);
        hybrid::PlanInputs in = inputs_of(req);
        hybrid::PlannerConfig cfg = config_of(req);
        auto adv = make_advisor(req.value("advisor", "heuristic"), req.value("record", ""));

        std::unique_ptr<hybrid::Clock> clock;
        if (req.value("logical_clock", false)) clock = std::make_unique<hybrid::SteppedClock>();
        hybrid::PlanResult res = hybrid::plan(in, cfg, *adv, clock.get());

        std::string out_dir = req.value("out_dir", "");
        if (!out_dir.empty()) hybrid::write_run_outputs(out_dir, in, cfg, res);

        json body{{"success", res.success},
                  {"failure", res.failure},
                  {"planning_time", res.planning_time},
                  {"expansions", res.expansions},
                  {"backtracks", res.backtracks},
                  {"retries", res.retries},
                  {"plan_file", res.success && !out_dir.empty()
                                    ? json(out_dir + "/plan.json")
                                    : json(nullptr)}};
        return finish(out, res.success ? TAMP_OK : TAMP_ERR_PLANNING, body.dump(1),
                      res.success ? "" : res.failure);
    });
}

tamp_status tamp_replay_run(const char* plan_path, tamp_result** out) {
    return guarded(out, [&]() -> tamp_status {
        if (!plan_path) throw BadRequest("plan path is null");
        if (!fs::exists(plan_path)) throw IoError(std::string("cannot read ") + plan_path);
        hybrid::ReplayResult res = hybrid::replay_plan_file(plan_path);
        json body{{"ok", res.ok},
                  {"error", res.error},
                  {"steps", res.steps},
                  {"goal_satisfied", res.goal_satisfied}};
        bool good = res.ok && res.goal_satisfied;
        std::string err = res.ok ? (res.goal_satisfied ? "" : "goal not satisfied after replay")
                                 : res.error;
        return finish(out, good ? TAMP_OK : TAMP_ERR_PLANNING, body.dump(1), err);
    });
}

tamp_status tamp_gen_instance(const char* request_json, tamp_result** out) {
    return guarded(out, [&] {
        json req = parse_request(request_json);
        bench::InstanceSpec spec;
        spec.domain = domain_of(req.value("domain", "blocksworld"));
        spec.n = req.value("n", 3);
        spec.seed = req.value("seed", 0);
        bench::Instance inst;
        try {
            inst = bench::gen_instance(spec);
        } catch (const std::invalid_argument& e) {
            throw BadRequest(e.what());
        }
        std::string scene_text = hybrid::scene_to_json(inst.scene);
        std::string out_dir = req.value("out_dir", "");
        if (!out_dir.empty()) {
            fs::create_directories(out_dir);
            spill(out_dir + "/domain.pddl", inst.domain_text + "\n");
            spill(out_dir + "/problem.pddl", inst.problem_text + "\n");
            spill(out_dir + "/scene.json", scene_text + "\n");
        }
        json body{{"domain_text", inst.domain_text},
                  {"problem_text", inst.problem_text},
                  {"scene", json::parse(scene_text)}};
        return finish(out, TAMP_OK, body.dump(1), "");
    });
}

tamp_status tamp_bench_run(const char* request_json, tamp_result** out) {
    return guarded(out, [&] {
        json req = parse_request(request_json);
        bench::SuiteSpec spec;
        spec.config = config_of(req);
        spec.out_dir = req.value("out_dir", "");
        spec.jobs = req.value("jobs", 1);
        spec.logical_clock = req.value("logical_clock", false);

        int n_min = req.value("n_min", 3), n_max = req.value("n_max", n_min);
        int instances = req.value("instances", 10);
        std::uint64_t seed_base = req.value("seed_base", 0);
        if (n_min > n_max || instances < 0) throw BadRequest("bad n range or instance count");
        for (const auto& d : req.value("domains", std::vector<std::string>{"blocksworld"})) {
            bench::Domain dom = domain_of(d);
            for (int n = n_min; n <= n_max; ++n)
                for (int i = 0; i < instances; ++i)
                    spec.instances.push_back({dom, n, seed_base + static_cast<std::uint64_t>(i)});
        }
        for (const auto& a : req.value("advisors", std::vector<std::string>{"heuristic"})) {
            make_advisor(a, "");  // validate the spec before any planning
            spec.advisors.emplace_back(a, [a] { return make_advisor(a, ""); });
        }

        auto rows = bench::run_suite(spec);
        std::string csv = bench::to_csv(rows);
        std::string summary = bench::summary_table(rows);
        std::string csv_file;
        if (!spec.out_dir.empty()) {
            fs::create_directories(spec.out_dir);
            csv_file = spec.out_dir + "/results.csv";
            spill(csv_file, csv);
            spill(spec.out_dir + "/summary.txt", summary);
        }
        int wins = 0;
        for (const auto& r : rows) wins += r.success ? 1 : 0;
        json body{{"rows", rows.size()},
                  {"successes", wins},
                  {"csv_file", csv_file},
                  {"summary", summary}};
        return finish(out, TAMP_OK, body.dump(1), "");
    });
}

const char* tamp_version(void) { return "0.1.0"; }

const char* tamp_status_name(tamp_status s) {
    switch (s) {
        case TAMP_OK: return "ok";
        case TAMP_ERR_INVALID_ARGUMENT: return "invalid-argument";
        case TAMP_ERR_PARSE: return "parse-error";
        case TAMP_ERR_IO: return "io-error";
        case TAMP_ERR_PLANNING: return "planning-failed";
        case TAMP_ERR_INTERNAL: return "internal-error";
    }
    return "unknown";
}

}  // extern "C"
