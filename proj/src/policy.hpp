#pragma once

#include <cstdint>
#include <vector>

#include "capacity.hpp"
#include "connectivity.hpp"
#include "graph.hpp"
#include "rng.hpp"

namespace dagcast {

// Per-node counter of the latest in-order packet held: node j owns exactly
// packets 1..r[j]. At the source the counter is the cumulative arrival count.
struct FrontierState {
  std::vector<std::int64_t> r;
};

FrontierState make_frontier(const Network& net);

// Packet deficit x[j] = min over in-neighbors i of (r[i] - r[j]), and the
// lexicographically-first argmin in-neighbor supplier[j] (-1 at the source).
// With in-order delivery the deficit is exactly the number of packets j's
// best-supplied neighbor could still hand over.
struct VirtualQueues {
  std::vector<std::int64_t> x;
  std::vector<int> supplier;
};

VirtualQueues compute_virtual_queues(const Network& net, const FrontierState& state);

// dependents[j] = out-neighbors m whose supplier is j, ascending. Serving j
// helps exactly these nodes next, which is what the edge weights charge for.
std::vector<std::vector<int>> compute_dependents(const Network& net, const VirtualQueues& vq);

// w[e] for edge (i,j): x[j] minus the summed deficits of j's dependents when
// e is ON in sigma, exactly 0 when OFF. May be negative.
std::vector<std::int64_t> link_weights(const Network& net, const VirtualQueues& vq,
                                       const std::vector<std::vector<int>>& dependents,
                                       EdgeMask sigma);

// Activation maximizing sum of cap(e) * w[e] over all feasible activations
// inside sigma. The empty activation always competes with score 0; among
// maximizers the numerically smallest mask wins, so results are reproducible.
// The candidates overload scores a precomputed ascending matching list,
// skipping entries not inside sigma.
EdgeMask max_weight_activation(const Network& net, EdgeMask sigma,
                               const std::vector<std::int64_t>& w,
                               const std::vector<EdgeMask>& candidates);
EdgeMask max_weight_activation(const Network& net, EdgeMask sigma,
                               const std::vector<std::int64_t>& w, std::size_t match_limit);

// One synchronous slot of transfers: every activated edge (i,j) moves
// min(cap(e), ceiling(j)) packets where ceiling(j) = (min over in-neighbors
// k of r[k] at slot start) - r[j], floored at 0. All ceilings read the
// slot-start state, so nothing received this slot is relayed this slot. The
// ceiling enforces that only packets held by every in-neighbor move, keeping
// deficits nonnegative under any activation choice.
struct ScheduleOutcome {
  FrontierState next;
  // Packets moved per edge id; nonzero only on activated edges.
  std::vector<std::int64_t> edge_packets;
};

ScheduleOutcome schedule_packets(const Network& net, const FrontierState& state,
                                 EdgeMask activation);

// Checks the per-node queue recursion between consecutive slots:
//   next.x[j] <= (prev.x[j] - delivered to j)^+ + inflow at prev.supplier[j]
// where inflow at the source means that slot's exogenous arrivals. Returns
// the first violating node id, or -1 when every node satisfies it. `arrivals`
// is the arrival count credited to the source between the two measurements.
int lindley_violation(const Network& net, const VirtualQueues& prev,
                      const std::vector<std::int64_t>& edge_packets, std::int64_t arrivals,
                      const VirtualQueues& next);

// What each node believes about every counter, refreshed only across ON
// edges. Per slot update, each ON edge runs two exchanges: first both
// endpoints beacon their own true counters, then both relay their whole
// tables as frozen after the first pass -- so two-hop values arrive through
// common neighbors one slot later at worst, and instantly when the relevant
// links are ON together. Entries carry the slot stamp of the counter value;
// merges keep the fresher stamp. A node's row about itself is always true.
class DelayedView {
 public:
  explicit DelayedView(const Network& net);

  // update_prob gates each ON edge's whole exchange for the slot; draws from
  // rng happen only when update_prob < 1, so the default consumes no
  // randomness. slot stamps the refreshed entries.
  void update(const Network& net, EdgeMask sigma, const FrontierState& truth, int slot,
              double update_prob = 1.0, RngStream* rng = nullptr);

  std::int64_t value(int holder, int about) const;
  int stamp(int holder, int about) const;

  // Deficit of node m as computed by `viewer` from its own table; for
  // m == viewer the own-counter entry is exact. May be negative for m !=
  // viewer when staleness skews the table.
  std::int64_t local_deficit(const Network& net, int viewer, int m) const;
  // Lexicographically-first argmin in-neighbor of m per viewer's table.
  int local_supplier(const Network& net, int viewer, int m) const;

 private:
  int n_ = 0;
  std::vector<std::int64_t> value_;
  std::vector<int> stamp_;
  std::vector<std::int64_t> scratch_value_;
  std::vector<int> scratch_stamp_;
};

// Weights for the same max-weight rule, but every edge's weight comes out of
// its receiver's stale table: the receiver prices itself and its dependents
// from what it believes. With fully fresh views this equals link_weights.
std::vector<std::int64_t> delayed_link_weights(const Network& net, const DelayedView& view,
                                               EdgeMask sigma);

EdgeMask delayed_activation(const Network& net, EdgeMask sigma, const DelayedView& view,
                            const std::vector<EdgeMask>& candidates);
EdgeMask delayed_activation(const Network& net, EdgeMask sigma, const DelayedView& view,
                            std::size_t match_limit);

// Rate-targeted randomized reference: per configuration, sample an
// activation from the capacity solution's distribution, then thin each
// chosen edge by its receiver's acceptance probability. Acceptance
// probabilities are set so node v_l (topological label l, source holds 1)
// sees expected inflow lambda + (lambda_star - lambda) * l / n, strictly
// between lambda and lambda_star.
struct RandPolicy {
  std::vector<EdgeMask> support;          // configuration masks, ascending
  std::vector<ActivationDist> dists;      // aligned with support
  std::vector<double> accept;             // per node id; 1.0 at the source
  std::vector<int> label;                 // topological label per node id
};

// Requires 0 <= lambda < cap.lambda_star (else RateAboveCapacity); cap must
// come from the same net and dist.
RandPolicy build_rand_policy(const Network& net, const ConfigTable& dist, double lambda,
                             const CapacityResult& cap);

// Throws UnknownConfiguration when sigma is not in the support table.
// Consumes one uniform for the activation row plus one per selected edge.
EdgeMask rand_activation(const Network& net, const RandPolicy& policy, EdgeMask sigma,
                         RngStream& rng);

// Supplier chain from the source to j (j != r): [r, ..., supplier[j], j].
// Along it the counters telescope: r[j] = r[source] - sum of x over the
// non-source path nodes.
std::vector<int> construct_path(const Network& net, const VirtualQueues& vq, int j);

}  // namespace dagcast
