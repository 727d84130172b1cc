#ifndef TAMP_H
#define TAMP_H

/* C interface to the planner. Every call fills a result handle that owns its
 * strings; free it with tamp_result_free. Calls never throw across the
 * boundary: problems come back as a status code plus an error message on the
 * handle. Requests and results are JSON documents; the schemas are described
 * in the README.
 */

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tamp_status {
    TAMP_OK = 0,
    TAMP_ERR_INVALID_ARGUMENT = 1, /* malformed request json or bad field */
    TAMP_ERR_PARSE = 2,            /* domain, problem, scene, or plan file rejected */
    TAMP_ERR_IO = 3,               /* file could not be read or written */
    TAMP_ERR_PLANNING = 4,         /* planner ran out of options, time, or plans */
    TAMP_ERR_INTERNAL = 5
} tamp_status;

typedef struct tamp_result tamp_result;

/* JSON document with the call's output; NULL until a call succeeds. The
 * pointer stays valid until tamp_result_free. */
const char* tamp_result_json(const tamp_result* r);

/* Empty string when the call succeeded. */
const char* tamp_result_error(const tamp_result* r);

void tamp_result_free(tamp_result* r);

/* Request: {"domain_file"|"domain_text", "problem_file"|"problem_text",
 * "scene_file"|"scene", "advisor": "heuristic"|"scripted:F"|"remote:URL"|
 * "replay:F", optional "record": F, "out_dir", "logical_clock", "robot":
 * {"base_position":[x,y,z],"base_yaw":r}, "config": {planner knobs}}.
 * Result: {"success","failure","planning_time","expansions","backtracks",
 * "retries","plan_file"}. TAMP_ERR_PLANNING means the planner finished
 * without a plan; the result json is still filled in. */
tamp_status tamp_plan_run(const char* request_json, tamp_result** out);

/* Result: {"ok","error","steps","goal_satisfied"}. TAMP_ERR_PLANNING when
 * the plan does not execute or the goal fails afterwards. */
tamp_status tamp_replay_run(const char* plan_path, tamp_result** out);

/* Request: {"domain":"blocksworld"|"kitchen","n",:"seed", optional
 * "out_dir"}. Result: {"domain_text","problem_text","scene"}; with out_dir
 * the three land there as domain.pddl, problem.pddl, scene.json. */
tamp_status tamp_gen_instance(const char* request_json, tamp_result** out);

/* Request: {"domains":[...],"n_min","n_max","instances","seed_base",
 * "advisors":[...],"jobs","out_dir","logical_clock","config":{...}}.
 * Result: {"rows","successes","csv_file","summary"}; the CSV and summary
 * are also written under out_dir. */
tamp_status tamp_bench_run(const char* request_json, tamp_result** out);

const char* tamp_version(void);
const char* tamp_status_name(tamp_status s);

#ifdef __cplusplus
}
#endif

#endif /* TAMP_H */
