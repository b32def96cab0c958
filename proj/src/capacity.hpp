#pragma once

#include <optional>
#include <vector>

#include "connectivity.hpp"
#include "graph.hpp"

namespace dagcast {

// Distribution over activations: positive weights summing to 1, masks in
// ascending order.
struct ActivationDist {
  std::vector<EdgeMask> masks;
  std::vector<double> weights;
};

struct CapacityResult {
  double lambda_star = 0.0;
  // Aligned with the configuration table rows.
  std::vector<ActivationDist> per_config;
  // Expected service rate per edge under the optimal schedule (probability
  // and capacity applied).
  std::vector<double> edge_rate;
  // Expected rate into each node; +inf at the source, which has no in-edges.
  std::vector<double> node_cut_rate;
  // Argmin of node_cut_rate, ascending node id.
  std::vector<int> tight_nodes;
};

// Exact broadcast capacity of the time-varying network described by the
// table: the largest injection rate coverable by per-configuration
// activation distributions, limited by single-node cuts (which suffice on a
// DAG; the all-cuts variant below exists to verify exactly that).
CapacityResult compute_capacity(const Network& net, const ConfigTable& table);
CapacityResult compute_capacity(const Network& net, const ConfigTable& table,
                                std::size_t match_limit);

// Capacity with every edge always ON.
CapacityResult compute_static_capacity(const Network& net);

struct GeneralCutCapacity {
  double lambda = 0.0;
  std::vector<double> cut_rates;
};

// Same LP under an arbitrary cut family (used to check that single-node
// cuts already pin the optimum).
GeneralCutCapacity compute_capacity_general(const Network& net, const ConfigTable& table,
                                            const std::vector<CutVector>& cuts,
                                            std::size_t match_limit);

// Sandwich for independent uniform-marginal ON probability p:
// p * static <= capacity <= static.
struct CapacityBounds {
  double lower = 0.0;
  double upper = 0.0;
  double marginal = 1.0;
};
CapacityBounds capacity_bounds(const Network& net, double p);

// The p-approximation: value p * static capacity, achieved by restricting
// the static distribution to each configuration's ON edges.
struct ApproxCapacity {
  double value = 0.0;
  double marginal = 1.0;
  ActivationDist certificate;
};
ApproxCapacity approx_capacity(const Network& net, double p);

struct PolytopeViolation {
  enum class Kind { OffSupport, Negative, Degree, OddSet } kind = Kind::Negative;
  int edge = -1;
  int node = -1;
  std::vector<int> odd_set;
  double lhs = 0.0;
  double rhs = 0.0;
};

// Membership of beta (indexed by edge id) in the matching hull of the ON
// subgraph, decided by the facet description in the undirected view:
// nonnegativity, per-node degree <= 1, and for every odd node subset U the
// edges inside U summing to at most (|U|-1)/2. Returns the first violated
// facet, or nullopt for members. Odd sets are enumerated over nodes touched
// by positive-beta edges; more than odd_limit such nodes is refused.
std::optional<PolytopeViolation> check_matching_polytope_membership(
    const Network& net, EdgeMask on, const std::vector<double>& beta, double tol = 1e-9,
    int odd_limit = 20);

}  // namespace dagcast
