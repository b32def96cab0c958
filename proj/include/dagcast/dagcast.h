#ifndef DAGCAST_DAGCAST_H
#define DAGCAST_DAGCAST_H

/* C interface to the dagcast library. Every function is safe to call from
 * any thread; failure details are stored per thread and stay valid until the
 * next dagcast_* call on that thread. Strings handed out through char**
 * outputs are owned by the caller and released with dagcast_string_free. */

#ifdef __cplusplus
extern "C" {
#endif

/* Status values double as process exit codes: 0 success, 2 the input is at
 * fault, 3 the computation hit a solver failure or resource guard. */
typedef enum dagcast_status {
  DAGCAST_OK = 0,
  DAGCAST_ERR_INPUT = 2,
  DAGCAST_ERR_SOLVER = 3
} dagcast_status;

typedef struct dagcast_net dagcast_net;
typedef struct dagcast_process dagcast_process;

const char* dagcast_version(void);

/* Name and message of the last failure on the calling thread ("" when the
 * last call succeeded). */
const char* dagcast_last_error_name(void);
const char* dagcast_last_error_message(void);

/* json_text: {"nodes": [...], "source": ..., "edges": [...]}. */
int dagcast_net_parse(const char* json_text, dagcast_net** out);
void dagcast_net_free(dagcast_net* net);

int dagcast_net_node_count(const dagcast_net* net);
int dagcast_net_edge_count(const dagcast_net* net);

/* json_text: {"type": "table"|"iid"|"markov", ...}. */
int dagcast_process_parse(const dagcast_net* net, const char* json_text,
                          dagcast_process** out);
void dagcast_process_free(dagcast_process* proc);

/* options_json (may be NULL for the default mode "exact"):
 *   {"mode": "exact"|"static"|"bounds"|"approx",
 *    "p": number,            bounds/approx only, required there
 *    "match_limit": integer} optional enumeration guard override
 * "exact" needs proc (any flavor; reduced to its stationary law); the other
 * modes ignore it. On success *out_json holds the result document. */
int dagcast_capacity_run(const dagcast_net* net, const dagcast_process* proc,
                         const char* options_json, char** out_json);

/* options_json (required):
 *   {"policy": "pistar"|"piprime"|"rand", "lambda": rate, "slots": T,
 *    "seed": n, "warmup"?: n, "lambda_design"?: rate (rand), "update_prob"?: p,
 *    "arrivals"?: "poisson"|"deterministic",
 *    "checks"?: "off"|"sampled"|"every-slot", "queue_stride"?: n,
 *    "record_trace"?: bool, "theta"?: x, "match_limit"?: n}
 * On success *out_json holds the run report ("schema": 1). */
int dagcast_simulate_run(const dagcast_net* net, const dagcast_process* proc,
                         const char* options_json, char** out_json);

/* spec_json is self-contained (network and process or p list inline); see
 * the sweep documentation. jobs >= 1 worker threads. *out_csv receives the
 * fixed-schema CSV: lambda,p,policy,mean_delay,delivered_rate,stable,seed. */
int dagcast_sweep_run(const char* spec_json, int jobs, char** out_csv);

/* *out_json: [{"name", "kind", "summary"}, ...] for every bundled fixture. */
int dagcast_fixture_list(char** out_json);

/* Replays one bundled fixture and checks its expectation. *out_json holds
 * the result with a "pass" flag; returns DAGCAST_ERR_SOLVER when the
 * expectation fails. Sweep fixtures also fill *out_csv when it is non-NULL
 * (pass NULL otherwise). */
int dagcast_fixture_run(const char* name, char** out_json, char** out_csv);

void dagcast_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* DAGCAST_DAGCAST_H */
