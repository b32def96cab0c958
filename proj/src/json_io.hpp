#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "capacity.hpp"
#include "connectivity.hpp"
#include "graph.hpp"
#include "sim.hpp"

namespace dagcast {

// Parsers reject unknown keys everywhere so typos surface as InputError
// instead of silently ignored settings.

// {"nodes": ["r", ...], "source": "r", "edges": [{"src","dst","cap"?}, ...]}
Network parse_network(const nlohmann::json& doc);
Network parse_network_text(const std::string& text);

// Tagged by "type":
//   {"type": "table", "configs": [{"on": [["r","a"], ...], "prob": 0.25}, ...]}
//   {"type": "iid", "prob": 0.5}
//   {"type": "iid", "probs": [{"edge": ["r","a"], "prob": 0.6}, ...]}  (every edge once)
//   {"type": "markov", "states": [[["r","a"]], ...], "transition": [[...]], "initial"?: 0}
// Probabilities may be JSON numbers or decimal strings ("0.25").
ConfigProcess parse_process(const Network& net, const nlohmann::json& doc);
ConfigProcess parse_process_text(const Network& net, const std::string& text);

// {"lambda_star": ..., "tight_nodes": [names...],
//  "beta_star": {"<sigma index>": [[[edge ids...], weight], ...], ...},
//  "edges": [["src","dst"], ...]}   (edge-id legend)
nlohmann::json capacity_result_json(const Network& net, const CapacityResult& res);

nlohmann::json capacity_bounds_json(const CapacityBounds& b);
nlohmann::json approx_capacity_json(const Network& net, const ApproxCapacity& a);

// Simulation options shared by the C API and the CLI:
// {"policy": "pistar"|"piprime"|"rand", "lambda": rate, "slots": T,
//  "seed": n, "warmup"?: n, "lambda_design"?: rate, "update_prob"?: p,
//  "arrivals"?: "poisson"|"deterministic",
//  "checks"?: "off"|"sampled"|"every-slot", "queue_stride"?: n,
//  "record_trace"?: bool, "theta"?: x, "match_limit"?: n}
SimConfig parse_sim_options(const nlohmann::json& doc);

// Versioned run report ("schema": 1): arrivals, per-node delivery counts,
// delay list and summary, thinned queue series, stability verdict, check
// coverage, activation-trace hash (and the trace itself when recorded).
nlohmann::json sim_report_json(const Network& net, const SimConfig& cfg, const SimReport& rep);

// Self-contained sweep description:
// {"network": {...}, "process": {...} XOR "p_values": [..],
//  "lambdas": [..], "slots": T, "seed": n, "policies"?: ["pistar", ...],
//  "warmup"?: n, "replications"?: k, "lambda_design"?: rate,
//  "update_prob"?: p, "arrivals"?: .., "checks"?: .., "theta"?: x,
//  "match_limit"?: n}
SweepSpec parse_sweep_spec(const nlohmann::json& doc);
SweepSpec parse_sweep_spec_text(const std::string& text);

// Single line, no trailing newline: {"error": name, "message": msg}
std::string error_json(const char* name, const std::string& message);

// Shared by parsers: throws InputError naming `where` on any key outside
// `allowed`, on wrong value kinds, or on probabilities outside [0, 1].
void require_keys(const nlohmann::json& obj, const char* where,
                  std::initializer_list<const char*> allowed);
double parse_probability(const nlohmann::json& v, const char* where);

// File loader shared by the CLI and fixtures; throws InputError when the
// file cannot be read or holds invalid JSON.
nlohmann::json load_json_file(const std::string& path);

}  // namespace dagcast
