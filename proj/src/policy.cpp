#include "policy.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>

namespace dagcast {

namespace {

std::int64_t activation_score(const Network& net, EdgeMask mask,
                              const std::vector<std::int64_t>& w) {
  std::int64_t score = 0;
  while (mask != 0) {
    const int e = std::countr_zero(mask);
    mask &= mask - 1;
    score += net.cap(e) * w[static_cast<std::size_t>(e)];
  }
  return score;
}

}  // namespace

FrontierState make_frontier(const Network& net) {
  return FrontierState{std::vector<std::int64_t>(static_cast<std::size_t>(net.node_count()), 0)};
}

VirtualQueues compute_virtual_queues(const Network& net, const FrontierState& state) {
  const int n = net.node_count();
  VirtualQueues vq;
  vq.x.assign(static_cast<std::size_t>(n), 0);
  vq.supplier.assign(static_cast<std::size_t>(n), -1);
  for (int j = 0; j < n; ++j) {
    if (j == net.source()) continue;
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    int pick = -1;
    // In-edges are ascending by source id, so the first strict minimum is the
    // lexicographic winner.
    for (int e : net.in_edges(j)) {
      const std::int64_t gap = state.r[static_cast<std::size_t>(net.edge(e).src)] -
                               state.r[static_cast<std::size_t>(j)];
      if (gap < best) {
        best = gap;
        pick = net.edge(e).src;
      }
    }
    vq.x[static_cast<std::size_t>(j)] = best;
    vq.supplier[static_cast<std::size_t>(j)] = pick;
  }
  return vq;
}

std::vector<std::vector<int>> compute_dependents(const Network& net, const VirtualQueues& vq) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(net.node_count()));
  for (int m = 0; m < net.node_count(); ++m) {
    const int s = vq.supplier[static_cast<std::size_t>(m)];
    if (s >= 0) out[static_cast<std::size_t>(s)].push_back(m);
  }
  return out;
}

std::vector<std::int64_t> link_weights(const Network& net, const VirtualQueues& vq,
                                       const std::vector<std::vector<int>>& dependents,
                                       EdgeMask sigma) {
  std::vector<std::int64_t> w(static_cast<std::size_t>(net.edge_count()), 0);
  for (int e = 0; e < net.edge_count(); ++e) {
    if ((sigma & (EdgeMask{1} << e)) == 0) continue;
    const int j = net.edge(e).dst;
    std::int64_t weight = vq.x[static_cast<std::size_t>(j)];
    for (int k : dependents[static_cast<std::size_t>(j)])
      weight -= vq.x[static_cast<std::size_t>(k)];
    w[static_cast<std::size_t>(e)] = weight;
  }
  return w;
}

EdgeMask max_weight_activation(const Network& net, EdgeMask sigma,
                               const std::vector<std::int64_t>& w,
                               const std::vector<EdgeMask>& candidates) {
  EdgeMask best_mask = 0;
  std::int64_t best_score = 0;  // the empty activation is always available
  for (EdgeMask mask : candidates) {
    if ((mask & ~sigma) != 0) continue;
    const std::int64_t score = activation_score(net, mask, w);
    if (score > best_score) {
      best_score = score;
      best_mask = mask;
    }
  }
  return best_mask;
}

EdgeMask max_weight_activation(const Network& net, EdgeMask sigma,
                               const std::vector<std::int64_t>& w, std::size_t match_limit) {
  return max_weight_activation(net, sigma, w, enumerate_matchings(net, sigma, match_limit));
}

ScheduleOutcome schedule_packets(const Network& net, const FrontierState& state,
                                 EdgeMask activation) {
  ScheduleOutcome out;
  out.next = state;
  out.edge_packets.assign(static_cast<std::size_t>(net.edge_count()), 0);
  EdgeMask rest = activation;
  while (rest != 0) {
    const int e = std::countr_zero(rest);
    rest &= rest - 1;
    const int j = net.edge(e).dst;
    // Only packets already held by every in-neighbor may move, and receptions
    // read the slot-start state: a packet arriving now is relayable next slot.
    std::int64_t ceiling = std::numeric_limits<std::int64_t>::max();
    for (int in_e : net.in_edges(j)) {
      ceiling = std::min(ceiling, state.r[static_cast<std::size_t>(net.edge(in_e).src)]);
    }
    ceiling = std::max<std::int64_t>(0, ceiling - state.r[static_cast<std::size_t>(j)]);
    const std::int64_t moved = std::min(net.cap(e), ceiling);
    out.edge_packets[static_cast<std::size_t>(e)] = moved;
    out.next.r[static_cast<std::size_t>(j)] += moved;
  }
  return out;
}

int lindley_violation(const Network& net, const VirtualQueues& prev,
                      const std::vector<std::int64_t>& edge_packets, std::int64_t arrivals,
                      const VirtualQueues& next) {
  auto inflow = [&](int v) {
    std::int64_t total = 0;
    for (int e : net.in_edges(v)) total += edge_packets[static_cast<std::size_t>(e)];
    return total;
  };
  for (int j = 0; j < net.node_count(); ++j) {
    if (j == net.source()) continue;
    const int s = prev.supplier[static_cast<std::size_t>(j)];
    const std::int64_t supply = (s == net.source()) ? arrivals : inflow(s);
    const std::int64_t drained =
        std::max<std::int64_t>(0, prev.x[static_cast<std::size_t>(j)] - inflow(j));
    if (next.x[static_cast<std::size_t>(j)] > drained + supply) return j;
  }
  return -1;
}

DelayedView::DelayedView(const Network& net)
    : n_(net.node_count()),
      value_(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0),
      stamp_(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0) {}

void DelayedView::update(const Network& net, EdgeMask sigma, const FrontierState& truth,
                         int slot, double update_prob, RngStream* rng) {
  const auto at = [this](int holder, int about) {
    return static_cast<std::size_t>(holder) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(about);
  };
  for (int v = 0; v < n_; ++v) {
    value_[at(v, v)] = truth.r[static_cast<std::size_t>(v)];
    stamp_[at(v, v)] = slot;
  }

  EdgeMask active = sigma;
  if (update_prob < 1.0) {
    if (rng == nullptr) fail(Err::Input, "update gating below 1 needs a random stream");
    EdgeMask rest = sigma;
    while (rest != 0) {
      const int e = std::countr_zero(rest);
      rest &= rest - 1;
      if (!(rng->uniform() < update_prob)) active &= ~(EdgeMask{1} << e);
    }
  }

  // First pass: endpoints of every participating edge learn each other's
  // current counters.
  EdgeMask rest = active;
  while (rest != 0) {
    const int e = std::countr_zero(rest);
    rest &= rest - 1;
    const int i = net.edge(e).src;
    const int j = net.edge(e).dst;
    value_[at(j, i)] = truth.r[static_cast<std::size_t>(i)];
    stamp_[at(j, i)] = slot;
    value_[at(i, j)] = truth.r[static_cast<std::size_t>(j)];
    stamp_[at(i, j)] = slot;
  }

  // Second pass: relay whole tables as frozen after the first pass. Merging
  // by stamp from a snapshot makes edge order irrelevant; equal stamps carry
  // equal values, so skipping them changes nothing.
  scratch_value_ = value_;
  scratch_stamp_ = stamp_;
  rest = active;
  while (rest != 0) {
    const int e = std::countr_zero(rest);
    rest &= rest - 1;
    const int i = net.edge(e).src;
    const int j = net.edge(e).dst;
    for (int w = 0; w < n_; ++w) {
      if (scratch_stamp_[at(i, w)] > stamp_[at(j, w)]) {
        stamp_[at(j, w)] = scratch_stamp_[at(i, w)];
        value_[at(j, w)] = scratch_value_[at(i, w)];
      }
      if (scratch_stamp_[at(j, w)] > stamp_[at(i, w)]) {
        stamp_[at(i, w)] = scratch_stamp_[at(j, w)];
        value_[at(i, w)] = scratch_value_[at(j, w)];
      }
    }
  }
}

std::int64_t DelayedView::value(int holder, int about) const {
  return value_[static_cast<std::size_t>(holder) * static_cast<std::size_t>(n_) +
                static_cast<std::size_t>(about)];
}

int DelayedView::stamp(int holder, int about) const {
  return stamp_[static_cast<std::size_t>(holder) * static_cast<std::size_t>(n_) +
                static_cast<std::size_t>(about)];
}

std::int64_t DelayedView::local_deficit(const Network& net, int viewer, int m) const {
  if (m == net.source()) return 0;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (int e : net.in_edges(m)) best = std::min(best, value(viewer, net.edge(e).src));
  return best - value(viewer, m);
}

int DelayedView::local_supplier(const Network& net, int viewer, int m) const {
  if (m == net.source()) return -1;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  int pick = -1;
  for (int e : net.in_edges(m)) {
    const std::int64_t v = value(viewer, net.edge(e).src);
    if (v < best) {
      best = v;
      pick = net.edge(e).src;
    }
  }
  return pick;
}

std::vector<std::int64_t> delayed_link_weights(const Network& net, const DelayedView& view,
                                               EdgeMask sigma) {
  // The weight of an ON edge depends only on its receiver, so price each
  // receiving node once from its own table.
  std::vector<std::int64_t> w(static_cast<std::size_t>(net.edge_count()), 0);
  std::vector<char> priced(static_cast<std::size_t>(net.node_count()), 0);
  std::vector<std::int64_t> node_weight(static_cast<std::size_t>(net.node_count()), 0);
  for (int e = 0; e < net.edge_count(); ++e) {
    if ((sigma & (EdgeMask{1} << e)) == 0) continue;
    const int j = net.edge(e).dst;
    if (!priced[static_cast<std::size_t>(j)]) {
      std::int64_t weight = view.local_deficit(net, j, j);
      for (int edge_out : net.out_edges(j)) {
        const int k = net.edge(edge_out).dst;
        if (view.local_supplier(net, j, k) == j) weight -= view.local_deficit(net, j, k);
      }
      node_weight[static_cast<std::size_t>(j)] = weight;
      priced[static_cast<std::size_t>(j)] = 1;
    }
    w[static_cast<std::size_t>(e)] = node_weight[static_cast<std::size_t>(j)];
  }
  return w;
}

EdgeMask delayed_activation(const Network& net, EdgeMask sigma, const DelayedView& view,
                            const std::vector<EdgeMask>& candidates) {
  return max_weight_activation(net, sigma, delayed_link_weights(net, view, sigma), candidates);
}

EdgeMask delayed_activation(const Network& net, EdgeMask sigma, const DelayedView& view,
                            std::size_t match_limit) {
  return delayed_activation(net, sigma, view, enumerate_matchings(net, sigma, match_limit));
}

RandPolicy build_rand_policy(const Network& net, const ConfigTable& dist, double lambda,
                             const CapacityResult& cap) {
  if (!(lambda >= 0.0)) fail(Err::Input, "target rate must be nonnegative");
  if (!(lambda < cap.lambda_star))
    fail(Err::RateAboveCapacity, "target rate " + std::to_string(lambda) +
                                     " is not below capacity " + std::to_string(cap.lambda_star));
  if (cap.per_config.size() != dist.masks.size())
    fail(Err::Input, "capacity result does not match the configuration table");

  RandPolicy policy;
  std::vector<std::size_t> order(dist.masks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return dist.masks[a] < dist.masks[b]; });
  for (std::size_t idx : order) {
    policy.support.push_back(dist.masks[idx]);
    policy.dists.push_back(cap.per_config[idx]);
  }

  const int n = net.node_count();
  policy.label.assign(static_cast<std::size_t>(n), 0);
  const std::vector<int> topo = topological_order(net);
  for (int pos = 0; pos < n; ++pos) policy.label[static_cast<std::size_t>(topo[pos])] = pos + 1;

  const double eps = cap.lambda_star - lambda;
  policy.accept.assign(static_cast<std::size_t>(n), 1.0);
  for (int v = 0; v < n; ++v) {
    if (v == net.source()) continue;
    // Inflow target lambda + eps*l/n never exceeds the node's served rate,
    // which is at least lambda_star, so the ratio only needs an fp clamp.
    const double target =
        lambda + eps * static_cast<double>(policy.label[static_cast<std::size_t>(v)]) /
                     static_cast<double>(n);
    policy.accept[static_cast<std::size_t>(v)] =
        std::min(1.0, target / cap.node_cut_rate[static_cast<std::size_t>(v)]);
  }
  return policy;
}

EdgeMask rand_activation(const Network& net, const RandPolicy& policy, EdgeMask sigma,
                         RngStream& rng) {
  const auto it = std::lower_bound(policy.support.begin(), policy.support.end(), sigma);
  if (it == policy.support.end() || *it != sigma)
    fail(Err::UnknownConfiguration, "configuration is outside the policy's support table");
  const ActivationDist& dist =
      policy.dists[static_cast<std::size_t>(it - policy.support.begin())];

  const double u = rng.uniform();
  std::size_t pick = dist.masks.size() - 1;
  double acc = 0.0;
  for (std::size_t k = 0; k < dist.masks.size(); ++k) {
    acc += dist.weights[k];
    if (u < acc) {
      pick = k;
      break;
    }
  }

  EdgeMask chosen = dist.masks[pick];
  EdgeMask kept = 0;
  while (chosen != 0) {
    const int e = std::countr_zero(chosen);
    chosen &= chosen - 1;
    if (rng.uniform() < policy.accept[static_cast<std::size_t>(net.edge(e).dst)])
      kept |= EdgeMask{1} << e;
  }
  return kept;
}

std::vector<int> construct_path(const Network& net, const VirtualQueues& vq, int j) {
  if (j < 0 || j >= net.node_count()) fail(Err::Input, "node id out of range");
  if (j == net.source()) fail(Err::Input, "path target must not be the source");
  std::vector<int> path{j};
  int u = j;
  while (u != net.source()) {
    u = vq.supplier[static_cast<std::size_t>(u)];
    path.push_back(u);
    if (path.size() > static_cast<std::size_t>(net.node_count()))
      fail(Err::InvariantViolation, "supplier chain does not reach the source");
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace dagcast
