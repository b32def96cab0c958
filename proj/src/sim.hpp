#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "connectivity.hpp"
#include "graph.hpp"
#include "policy.hpp"

namespace dagcast {

// The three schedulers the simulator can drive. MaxWeight prices links from
// the true packet counters every slot; MaxWeightDelayed prices them from each
// receiver's gossip table (counters exchanged only across ON links);
// Randomized replays a precomputed per-configuration activation lottery with
// per-receiver thinning.
enum class PolicyKind { MaxWeight, MaxWeightDelayed, Randomized };

// Poisson draws one variate per slot; Deterministic releases floor(lambda*t)
// packets cumulatively, which makes short unit-test runs exactly repeatable
// by hand.
enum class ArrivalKind { Poisson, Deterministic };

// How often the runtime self-checks fire: never, on a sparse fixed grid of
// slots, or on every slot (the mode CI uses).
enum class CheckLevel { Off, Sampled, EverySlot };

// Canonical names used by config files and the command line: "pistar",
// "piprime", "rand" (and "poisson"/"deterministic", "off"/"sampled"/
// "every-slot"). Unknown names raise Input errors.
PolicyKind parse_policy(const std::string& name);
const char* policy_name(PolicyKind k);
ArrivalKind parse_arrivals(const std::string& name);
const char* arrivals_name(ArrivalKind k);
CheckLevel parse_checks(const std::string& name);
const char* checks_name(CheckLevel k);

struct SimConfig {
  PolicyKind policy = PolicyKind::MaxWeight;
  ArrivalKind arrivals = ArrivalKind::Poisson;
  double lambda = 0.0;         // packets per slot into the source
  double lambda_design = -1.0; // randomized policy's target rate; required there
  std::int64_t slots = 0;      // horizon, >= 1
  std::uint64_t seed = 0;
  std::int64_t warmup = -1;    // arrivals this early are excluded from delay
                               // stats; -1 means slots / 10
  double update_prob = 1.0;    // chance an ON link exchanges counters (stale view)
  CheckLevel checks = CheckLevel::Sampled;
  double stability_theta = 0.01;
  std::int64_t queue_stride = 1; // thinning of the reported queue series
  bool record_trace = false;     // keep per-slot activation masks
  std::size_t match_limit = 0;   // 0 means the library default
};

// Outcome of the slope test on the total-deficit series. Short means the
// series had fewer than 1000 points, too little history to call.
enum class Stability { Stable, Unstable, Short };

struct StabilityVerdict {
  Stability kind = Stability::Short;
  double slope = 0.0;     // least-squares slope over the trailing window
  double theta = 0.0;
  double threshold = 0.0; // theta * max link capacity
  std::int64_t window = 0;
};

const char* stability_name(Stability s);

// Least-squares slope of the last half of the series; stable iff it stays
// under theta * c_max packets per slot. Throws SeriesTooShort below 1000
// points.
StabilityVerdict stability_verdict(const std::vector<std::int64_t>& series, double theta,
                                   std::int64_t c_max);

struct DelaySummary {
  std::int64_t count = 0;
  double mean = 0.0; // 0 when count == 0
  std::int64_t max = 0;
};

struct SimReport {
  std::int64_t slots = 0;
  std::int64_t warmup = 0;
  std::int64_t total_arrivals = 0;
  // Sum of deficits after each slot's arrivals, every queue_stride slots
  // (slot 1 first); the verdict is computed from the unthinned series.
  std::vector<std::int64_t> queue_series;
  std::int64_t queue_stride = 1;
  std::int64_t final_queue_sum = 0;
  // Slots from arrival to the last node's reception, inclusive, one entry
  // per delivered packet that arrived after warmup.
  std::vector<std::int64_t> delays;
  DelaySummary delay;
  std::vector<std::int64_t> final_frontier; // per node id
  std::int64_t delivered_count = 0;         // min over nodes of the frontier
  double delivered_rate = 0.0;              // delivered_count / slots
  StabilityVerdict verdict;
  std::int64_t slots_checked = 0; // how many slots ran the invariant suite
  std::uint64_t trace_hash = 0;   // order-sensitive hash of all activations
  std::vector<EdgeMask> trace;    // per-slot activations when record_trace
};

// Runs the slotted loop: arrivals, configuration draw, policy activation,
// packet transfer, metrics. Deterministic given cfg (independent substreams
// for arrivals, configurations, policy randomness, and view gossip are
// derived from cfg.seed). Invariant failures raise InvariantViolation naming
// the slot and node.
SimReport run_sim(const Network& net, const ConfigProcess& process, const SimConfig& cfg);

// One sweep point and its headline numbers. A row that failed keeps the
// error name and message instead of metrics.
struct SweepRow {
  double lambda = 0.0;
  double p = -1.0; // ON marginal for generated iid processes; -1 = fixed process
  PolicyKind policy = PolicyKind::MaxWeight;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;      // error name when !ok
  std::string message;    // human detail when !ok
  double mean_delay = 0.0;
  double delivered_rate = 0.0;
  Stability stable = Stability::Short;
};

// Cartesian sweep over (p or fixed process) x policies x lambdas x
// replications, in that nesting order. Rows run independently; failures are
// recorded and the sweep continues.
struct SweepSpec {
  Network net;
  bool has_process = false;
  ConfigProcess process;        // used when has_process
  std::vector<double> p_values; // else: uniform iid marginal per value
  std::vector<PolicyKind> policies;
  std::vector<double> lambdas;
  std::int64_t slots = 0;
  std::uint64_t seed = 0;
  std::int64_t warmup = -1;
  int replications = 1; // replication k runs with seed + k
  double lambda_design = -1.0;
  double update_prob = 1.0;
  ArrivalKind arrivals = ArrivalKind::Poisson;
  CheckLevel checks = CheckLevel::Off;
  double stability_theta = 0.01;
  std::size_t match_limit = 0;
};

// jobs = worker threads (>= 1); results are merged in row order regardless.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, int jobs);

// Fixed-schema CSV: lambda,p,policy,mean_delay,delivered_rate,stable,seed.
// p is empty for fixed-process rows; failed rows carry the error name in the
// stable column and empty metrics.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace dagcast
