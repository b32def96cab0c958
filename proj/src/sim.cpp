#include "sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "capacity.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace dagcast {

namespace {

constexpr std::int64_t kSampledStride = 97; // coprime with common horizons

bool check_slot(CheckLevel level, std::int64_t slot, std::int64_t horizon) {
  switch (level) {
    case CheckLevel::Off: return false;
    case CheckLevel::EverySlot: return true;
    case CheckLevel::Sampled:
      return slot == 1 || slot == horizon || slot % kSampledStride == 0;
  }
  return false;
}

[[noreturn]] void invariant_fail(std::int64_t slot, const std::string& what) {
  fail(Err::InvariantViolation, "slot " + std::to_string(slot) + ": " + what);
}

// Deficits nonnegative plus the exact counter identity along every supplier
// chain: r[j] = r[source] - sum of deficits on the chain, and the source
// counter equals the arrival total.
void check_state(const Network& net, const FrontierState& state, const VirtualQueues& vq,
                 std::int64_t total_arrivals, std::int64_t slot) {
  const int n = net.node_count();
  if (state.r[static_cast<std::size_t>(net.source())] != total_arrivals)
    invariant_fail(slot, "source counter diverged from the arrival total");
  for (int j = 0; j < n; ++j) {
    if (vq.x[static_cast<std::size_t>(j)] < 0)
      invariant_fail(slot, "negative deficit at node " + net.node_name(j));
  }
  for (int j = 0; j < n; ++j) {
    if (j == net.source()) continue;
    std::int64_t drop = 0;
    for (int v : construct_path(net, vq, j)) {
      if (v != net.source()) drop += vq.x[static_cast<std::size_t>(v)];
    }
    if (state.r[static_cast<std::size_t>(j)] !=
        state.r[static_cast<std::size_t>(net.source())] - drop) {
      invariant_fail(slot, "counter of node " + net.node_name(j) +
                               " does not telescope along its supplier chain");
    }
  }
}

void check_activation(const Network& net, EdgeMask sigma, EdgeMask act, std::int64_t slot) {
  if ((act & ~sigma) != 0) invariant_fail(slot, "activation uses an OFF link");
  std::vector<char> busy(static_cast<std::size_t>(net.node_count()), 0);
  for (int e = 0; e < net.edge_count(); ++e) {
    if (!((act >> e) & 1)) continue;
    const Edge& ed = net.edge(e);
    if (busy[static_cast<std::size_t>(ed.src)] || busy[static_cast<std::size_t>(ed.dst)])
      invariant_fail(slot, "activation is not a matching");
    busy[static_cast<std::size_t>(ed.src)] = 1;
    busy[static_cast<std::size_t>(ed.dst)] = 1;
  }
}

void check_transfer(const Network& net, const FrontierState& before, const VirtualQueues& vq,
                    const ScheduleOutcome& out, EdgeMask act, std::int64_t slot) {
  for (int e = 0; e < net.edge_count(); ++e) {
    const std::int64_t moved = out.edge_packets[static_cast<std::size_t>(e)];
    if (moved < 0) invariant_fail(slot, "negative transfer");
    if (moved > 0 && !((act >> e) & 1)) invariant_fail(slot, "transfer on an idle link");
    if (moved > net.cap(e)) invariant_fail(slot, "transfer exceeds link capacity");
    if (moved > vq.x[static_cast<std::size_t>(net.edge(e).dst)])
      invariant_fail(slot, "transfer exceeds the receiver deficit");
  }
  for (int j = 0; j < net.node_count(); ++j) {
    const auto ju = static_cast<std::size_t>(j);
    if (out.next.r[ju] < before.r[ju])
      invariant_fail(slot, "counter of node " + net.node_name(j) + " moved backwards");
    // Nobody passes the slowest in-neighbor as of the slot start.
    std::int64_t lead = std::numeric_limits<std::int64_t>::max();
    for (int e : net.in_edges(j))
      lead = std::min(lead, before.r[static_cast<std::size_t>(net.edge(e).src)]);
    if (j != net.source() && out.next.r[ju] > lead)
      invariant_fail(slot, "node " + net.node_name(j) + " received past its in-neighbors");
  }
}

std::int64_t deterministic_arrivals(double lambda, std::int64_t slot, std::int64_t emitted) {
  // Cumulative floor keeps long-run rate exact; the epsilon absorbs cases
  // like 5 * 0.2 landing a hair under an integer.
  const double due = std::floor(lambda * static_cast<double>(slot) + 1e-9);
  return static_cast<std::int64_t>(due) - emitted;
}

void validate_config(const SimConfig& cfg) {
  if (cfg.slots < 1) fail(Err::Input, "horizon must be at least one slot");
  if (cfg.slots > std::numeric_limits<int>::max())
    fail(Err::Input, "horizon too large for the gossip timestamps");
  if (!(cfg.lambda >= 0.0)) fail(Err::Input, "arrival rate must be nonnegative");
  if (!(cfg.update_prob >= 0.0 && cfg.update_prob <= 1.0))
    fail(Err::Input, "update probability must lie in [0, 1]");
  if (cfg.queue_stride < 1) fail(Err::Input, "queue stride must be positive");
  if (!(cfg.stability_theta > 0.0)) fail(Err::Input, "stability threshold must be positive");
  if (cfg.policy == PolicyKind::Randomized && cfg.lambda_design < 0.0)
    fail(Err::Input, "randomized policy needs a design rate");
}

}  // namespace

PolicyKind parse_policy(const std::string& name) {
  if (name == "pistar") return PolicyKind::MaxWeight;
  if (name == "piprime") return PolicyKind::MaxWeightDelayed;
  if (name == "rand") return PolicyKind::Randomized;
  fail(Err::Input, "unknown policy '" + name + "' (expected pistar, piprime, or rand)");
}

const char* policy_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::MaxWeight: return "pistar";
    case PolicyKind::MaxWeightDelayed: return "piprime";
    case PolicyKind::Randomized: return "rand";
  }
  return "?";
}

ArrivalKind parse_arrivals(const std::string& name) {
  if (name == "poisson") return ArrivalKind::Poisson;
  if (name == "deterministic") return ArrivalKind::Deterministic;
  fail(Err::Input, "unknown arrival model '" + name + "'");
}

const char* arrivals_name(ArrivalKind k) {
  return k == ArrivalKind::Poisson ? "poisson" : "deterministic";
}

CheckLevel parse_checks(const std::string& name) {
  if (name == "off") return CheckLevel::Off;
  if (name == "sampled") return CheckLevel::Sampled;
  if (name == "every-slot") return CheckLevel::EverySlot;
  fail(Err::Input, "unknown check level '" + name + "'");
}

const char* checks_name(CheckLevel k) {
  switch (k) {
    case CheckLevel::Off: return "off";
    case CheckLevel::Sampled: return "sampled";
    case CheckLevel::EverySlot: return "every-slot";
  }
  return "?";
}

const char* stability_name(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Short: return "short";
  }
  return "?";
}

StabilityVerdict stability_verdict(const std::vector<std::int64_t>& series, double theta,
                                   std::int64_t c_max) {
  if (series.size() < 1000)
    fail(Err::SeriesTooShort, "need at least 1000 queue samples, have " +
                                  std::to_string(series.size()));
  const std::size_t w = series.size() / 2;
  const std::size_t start = series.size() - w;
  double ybar = 0.0;
  for (std::size_t i = 0; i < w; ++i) ybar += static_cast<double>(series[start + i]);
  ybar /= static_cast<double>(w);
  const double xbar = (static_cast<double>(w) - 1.0) / 2.0;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < w; ++i) {
    const double dx = static_cast<double>(i) - xbar;
    num += dx * (static_cast<double>(series[start + i]) - ybar);
    den += dx * dx;
  }
  StabilityVerdict v;
  v.slope = num / den; // den > 0 since w >= 500
  v.theta = theta;
  v.threshold = theta * static_cast<double>(c_max);
  v.window = static_cast<std::int64_t>(w);
  v.kind = v.slope < v.threshold ? Stability::Stable : Stability::Unstable;
  return v;
}

SimReport run_sim(const Network& net, const ConfigProcess& process, const SimConfig& cfg) {
  validate_config(cfg);
  const std::int64_t warmup = cfg.warmup >= 0 ? cfg.warmup : cfg.slots / 10;
  if (warmup >= cfg.slots) fail(Err::Input, "warmup must be shorter than the horizon");
  const std::size_t match_limit =
      cfg.match_limit > 0 ? cfg.match_limit : default_matching_limit();

  RngStream arrival_rng = RngStream::derive(cfg.seed, kStreamArrivals);
  RngStream config_rng = RngStream::derive(cfg.seed, kStreamConfig);
  RngStream policy_rng = RngStream::derive(cfg.seed, kStreamPolicy);
  RngStream view_rng = RngStream::derive(cfg.seed, kStreamView);

  ConfigSampler sampler(net, process);

  // Matchings of the whole graph, filtered per slot to the ON set; same
  // masks, same order as enumerating within the slot's configuration.
  std::vector<EdgeMask> all_matchings;
  std::vector<EdgeMask> candidates;
  if (cfg.policy != PolicyKind::Randomized) {
    all_matchings = enumerate_matchings(net, net.full_mask(), match_limit);
    candidates.reserve(all_matchings.size());
  }

  RandPolicy rand_policy;
  if (cfg.policy == PolicyKind::Randomized) {
    const ConfigTable table = stationary_distribution(net, process);
    const CapacityResult cap = compute_capacity(net, table, match_limit);
    rand_policy = build_rand_policy(net, table, cfg.lambda_design, cap);
  }

  DelayedView view(net);

  FrontierState state = make_frontier(net);
  VirtualQueues prev_vq;
  std::vector<std::int64_t> prev_moves;
  bool have_prev = false;

  SimReport rep;
  rep.slots = cfg.slots;
  rep.warmup = warmup;
  rep.queue_stride = cfg.queue_stride;

  std::vector<std::int64_t> series;
  series.reserve(static_cast<std::size_t>(cfg.slots));
  std::vector<std::int64_t> arrival_slot; // indexed by packet number - 1
  std::int64_t total_arrivals = 0;
  std::int64_t emitted = 0;
  std::int64_t delivered = 0;
  std::uint64_t hash = 1469598103934665603ull;

  for (std::int64_t slot = 1; slot <= cfg.slots; ++slot) {
    std::int64_t a = cfg.arrivals == ArrivalKind::Poisson
                         ? sample_poisson(arrival_rng, cfg.lambda)
                         : deterministic_arrivals(cfg.lambda, slot, emitted);
    emitted += a;
    total_arrivals += a;
    state.r[static_cast<std::size_t>(net.source())] += a;
    for (std::int64_t i = 0; i < a; ++i) arrival_slot.push_back(slot);

    const VirtualQueues vq = compute_virtual_queues(net, state);
    std::int64_t qsum = 0;
    for (std::int64_t x : vq.x) qsum += x;
    series.push_back(qsum);

    // The queue recursion for the previous slot closes once this slot's
    // arrivals are on the books.
    if (have_prev && check_slot(cfg.checks, slot - 1, cfg.slots)) {
      const int bad = lindley_violation(net, prev_vq, prev_moves, a, vq);
      if (bad >= 0)
        invariant_fail(slot - 1, "queue recursion bound broken at node " + net.node_name(bad));
    }
    const bool checked = check_slot(cfg.checks, slot, cfg.slots);
    if (checked) {
      ++rep.slots_checked;
      check_state(net, state, vq, total_arrivals, slot);
    }

    const EdgeMask sigma = sampler.next(config_rng);

    EdgeMask act = 0;
    switch (cfg.policy) {
      case PolicyKind::MaxWeight: {
        candidates.clear();
        for (EdgeMask m : all_matchings)
          if ((m & ~sigma) == 0) candidates.push_back(m);
        const auto dep = compute_dependents(net, vq);
        act = max_weight_activation(net, sigma, link_weights(net, vq, dep, sigma), candidates);
        break;
      }
      case PolicyKind::MaxWeightDelayed: {
        view.update(net, sigma, state, static_cast<int>(slot), cfg.update_prob, &view_rng);
        candidates.clear();
        for (EdgeMask m : all_matchings)
          if ((m & ~sigma) == 0) candidates.push_back(m);
        act = delayed_activation(net, sigma, view, candidates);
        break;
      }
      case PolicyKind::Randomized:
        act = rand_activation(net, rand_policy, sigma, policy_rng);
        break;
    }
    if (checked) check_activation(net, sigma, act, slot);

    const ScheduleOutcome out = schedule_packets(net, state, act);
    if (checked) check_transfer(net, state, vq, out, act, slot);

    for (int b = 0; b < 8; ++b) {
      hash ^= (act >> (8 * b)) & 0xffu;
      hash *= 1099511628211ull;
    }
    if (cfg.record_trace) rep.trace.push_back(act);

    std::int64_t new_min = std::numeric_limits<std::int64_t>::max();
    for (std::int64_t r : out.next.r) new_min = std::min(new_min, r);
    while (delivered < new_min) {
      const std::int64_t arrived = arrival_slot[static_cast<std::size_t>(delivered)];
      ++delivered;
      if (arrived > warmup) rep.delays.push_back(slot - arrived + 1);
    }

    prev_vq = vq;
    prev_moves = out.edge_packets;
    have_prev = true;
    state = out.next;
  }

  // Close out the final transition with zero fresh arrivals.
  const VirtualQueues final_vq = compute_virtual_queues(net, state);
  if (check_slot(cfg.checks, cfg.slots, cfg.slots)) {
    const int bad = lindley_violation(net, prev_vq, prev_moves, 0, final_vq);
    if (bad >= 0)
      invariant_fail(cfg.slots, "queue recursion bound broken at node " + net.node_name(bad));
    check_state(net, state, final_vq, total_arrivals, cfg.slots);
  }

  rep.total_arrivals = total_arrivals;
  rep.final_frontier = state.r;
  rep.delivered_count = delivered;
  rep.delivered_rate = static_cast<double>(delivered) / static_cast<double>(cfg.slots);
  rep.final_queue_sum = series.back();
  rep.trace_hash = hash;

  rep.delay.count = static_cast<std::int64_t>(rep.delays.size());
  if (!rep.delays.empty()) {
    double sum = 0.0;
    std::int64_t mx = 0;
    for (std::int64_t d : rep.delays) {
      sum += static_cast<double>(d);
      mx = std::max(mx, d);
    }
    rep.delay.mean = sum / static_cast<double>(rep.delays.size());
    rep.delay.max = mx;
  }

  if (series.size() >= 1000) {
    rep.verdict = stability_verdict(series, cfg.stability_theta, net.max_cap());
  } else {
    rep.verdict.kind = Stability::Short;
    rep.verdict.theta = cfg.stability_theta;
    rep.verdict.threshold = cfg.stability_theta * static_cast<double>(net.max_cap());
  }

  if (cfg.queue_stride == 1) {
    rep.queue_series = std::move(series);
  } else {
    for (std::size_t i = 0; i < series.size(); i += static_cast<std::size_t>(cfg.queue_stride))
      rep.queue_series.push_back(series[i]);
  }
  return rep;
}

namespace {

struct SweepPoint {
  SweepRow row;
  const ConfigProcess* process;
};

SweepRow run_point(const Network& net, const SweepSpec& spec, const SweepPoint& pt) {
  SweepRow row = pt.row;
  SimConfig cfg;
  cfg.policy = row.policy;
  cfg.arrivals = spec.arrivals;
  cfg.lambda = row.lambda;
  cfg.lambda_design = spec.lambda_design;
  cfg.slots = spec.slots;
  cfg.seed = row.seed;
  cfg.warmup = spec.warmup;
  cfg.update_prob = spec.update_prob;
  cfg.checks = spec.checks;
  cfg.stability_theta = spec.stability_theta;
  cfg.queue_stride = spec.slots; // headline numbers only; skip the series
  cfg.match_limit = spec.match_limit;
  try {
    const SimReport rep = run_sim(net, *pt.process, cfg);
    row.ok = true;
    row.mean_delay = rep.delay.mean;
    row.delivered_rate = rep.delivered_rate;
    row.stable = rep.verdict.kind;
  } catch (const Error& e) {
    row.error = err_name(e.kind());
    row.message = e.what();
  } catch (const std::exception& e) {
    row.error = "InternalError";
    row.message = e.what();
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec, int jobs) {
  if (spec.slots < 1) fail(Err::Input, "horizon must be at least one slot");
  if (spec.replications < 1) fail(Err::Input, "replications must be positive");
  if (spec.has_process == !spec.p_values.empty())
    fail(Err::Input, "provide either a process or a list of ON probabilities");
  for (double p : spec.p_values) {
    if (!(p > 0.0 && p <= 1.0)) fail(Err::Input, "ON probability must lie in (0, 1]");
  }
  bool wants_rand = false;
  for (PolicyKind k : spec.policies) wants_rand = wants_rand || k == PolicyKind::Randomized;
  if (wants_rand && spec.lambda_design < 0.0)
    fail(Err::Input, "randomized policy rows need a design rate");
  if (jobs < 1) fail(Err::Input, "worker count must be positive");

  // Generated processes live for the whole sweep; rows reference them.
  std::vector<ConfigProcess> generated;
  generated.reserve(spec.p_values.size());
  for (double p : spec.p_values) {
    IidLinkProcess proc;
    proc.p.assign(static_cast<std::size_t>(spec.net.edge_count()), p);
    generated.emplace_back(std::move(proc));
  }

  std::vector<SweepPoint> points;
  const std::size_t process_count = spec.has_process ? 1 : generated.size();
  for (std::size_t pi = 0; pi < process_count; ++pi) {
    for (PolicyKind policy : spec.policies) {
      for (double lambda : spec.lambdas) {
        for (int rep = 0; rep < spec.replications; ++rep) {
          SweepPoint pt;
          pt.row.lambda = lambda;
          pt.row.p = spec.has_process ? -1.0 : spec.p_values[pi];
          pt.row.policy = policy;
          pt.row.seed = spec.seed + static_cast<std::uint64_t>(rep);
          pt.process = spec.has_process ? &spec.process : &generated[pi];
          points.push_back(pt);
        }
      }
    }
  }

  std::vector<SweepRow> rows(points.size());
  if (jobs == 1 || points.size() <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i)
      rows[i] = run_point(spec.net, spec, points[i]);
    return rows;
  }

  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= points.size()) return;
      rows[i] = run_point(spec.net, spec, points[i]);
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(jobs), points.size());
  pool.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "lambda,p,policy,mean_delay,delivered_rate,stable,seed\n";
  char buf[64];
  for (const SweepRow& row : rows) {
    std::snprintf(buf, sizeof buf, "%.10g", row.lambda);
    out += buf;
    out += ',';
    if (row.p >= 0.0) {
      std::snprintf(buf, sizeof buf, "%.10g", row.p);
      out += buf;
    }
    out += ',';
    out += policy_name(row.policy);
    out += ',';
    if (row.ok) {
      std::snprintf(buf, sizeof buf, "%.6g", row.mean_delay);
      out += buf;
      out += ',';
      std::snprintf(buf, sizeof buf, "%.6g", row.delivered_rate);
      out += buf;
      out += ',';
      out += stability_name(row.stable);
    } else {
      out += ",,";
      out += row.error;
    }
    out += ',';
    out += std::to_string(row.seed);
    out += '\n';
  }
  return out;
}

}  // namespace dagcast
