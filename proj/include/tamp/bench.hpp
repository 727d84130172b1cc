#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tamp/advisor.hpp"
#include "tamp/hybrid.hpp"

namespace tamp::bench {

enum class Domain { Blocksworld, Kitchen };

std::string domain_name(Domain d);

struct InstanceSpec {
    Domain domain = Domain::Blocksworld;
    int n = 3;  // blocks, or foods that must end up cooked
    std::uint64_t seed = 0;
};

// Everything one planner run consumes. The robot always stands at the front
// edge of the table facing it.
struct Instance {
    std::string domain_text;
    std::string problem_text;
    geom::Scene scene;
    robot::RobotModel robot;
};

// n blocks split into 2-3 random stacks; the goal is a different complete
// arrangement. Initial atoms fully describe the stacking.
Instance gen_blocksworld(int n, std::uint64_t seed);

// Six food boxes on the counter strip, hemmed in by 12 fixed gray
// distractors, with a sink pad and a stove pad behind them. The goal cooks a
// random n of the foods.
Instance gen_kitchen(int n, std::uint64_t seed);

Instance gen_instance(const InstanceSpec& spec);

// House placement: base at the table's front edge, facing it.
robot::RobotModel front_robot();

struct RunRecord {
    InstanceSpec instance;
    std::string advisor;
    bool success = false;
    double planning_time = 0.0;
    int expansions = 0;
    int backtracks = 0;
    int retries = 0;
    std::string plan_file;  // relative to the suite's out_dir; empty on failure
    std::string failure;    // planner verdict or crash reason; empty on success
};

std::string csv_header();
std::string csv_row(const RunRecord& r);
std::string to_csv(const std::vector<RunRecord>& rows);

using AdvisorFactory = std::function<std::unique_ptr<advisor::Advisor>()>;

struct SuiteSpec {
    std::vector<InstanceSpec> instances;
    std::vector<std::pair<std::string, AdvisorFactory>> advisors;
    hybrid::PlannerConfig config;  // seed is overridden per instance
    std::string out_dir;
    int jobs = 1;
    bool logical_clock = false;  // stepped time for byte-reproducible rows
};

// Runs every (instance, advisor) pair, writing plan files for successes under
// out_dir. A crashed run becomes a failure row; the suite keeps going. Row
// order matches the instance-major, advisor-minor nesting regardless of jobs.
std::vector<RunRecord> run_suite(const SuiteSpec& spec);

// Success rate and mean planning time over successes, grouped by
// (domain, n, advisor), aligned for terminal output.
std::string summary_table(const std::vector<RunRecord>& rows);

}  // namespace tamp::bench
