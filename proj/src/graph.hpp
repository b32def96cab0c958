#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"

namespace dagcast {

// Bit i set = edge with canonical index i is present (in a configuration) or
// activated (in a schedule). Canonical edge indices come from Network.
using EdgeMask = std::uint64_t;

struct Edge {
  int src;
  int dst;
  std::int64_t cap;
};

struct NamedEdge {
  std::string src;
  std::string dst;
  std::int64_t cap = 1;
};

// Directed acyclic network with a single source. Node ids follow the order
// names were given; edge ids are canonical: sorted by (src, dst) id pair.
// Validation enforces: >= 2 nodes, unique nonempty names, source present,
// integer capacities >= 1, no duplicate or self-loop edges, <= 64 edges,
// acyclic, every node reachable from the source.
class Network {
 public:
  static Network build(const std::vector<std::string>& names, const std::string& source,
                       const std::vector<NamedEdge>& named_edges);

  int node_count() const { return static_cast<int>(names_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int source() const { return source_; }

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
  std::int64_t cap(int e) const { return edges_[static_cast<std::size_t>(e)].cap; }
  std::int64_t max_cap() const { return max_cap_; }

  const std::vector<int>& in_edges(int v) const { return in_edges_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& out_edges(int v) const { return out_edges_[static_cast<std::size_t>(v)]; }
  EdgeMask in_mask(int v) const { return in_mask_[static_cast<std::size_t>(v)]; }
  EdgeMask out_mask(int v) const { return out_mask_[static_cast<std::size_t>(v)]; }
  EdgeMask incident_mask(int v) const { return in_mask(v) | out_mask(v); }
  EdgeMask full_mask() const {
    return edge_count() == 64 ? ~EdgeMask{0} : ((EdgeMask{1} << edge_count()) - 1);
  }

  const std::string& node_name(int v) const { return names_[static_cast<std::size_t>(v)]; }
  // -1 when the name is unknown.
  int node_id(const std::string& name) const;

 private:
  Network() = default;

  std::vector<std::string> names_;
  int source_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> in_edges_;
  std::vector<std::vector<int>> out_edges_;
  std::vector<EdgeMask> in_mask_;
  std::vector<EdgeMask> out_mask_;
  std::int64_t max_cap_ = 0;
};

// Only primary interference exists today: an activation is feasible iff no
// two activated edges share an endpoint (a matching in the undirected view).
// Enumeration and validation go through this predicate so a different model
// slots in without touching callers.
enum class Interference { Primary };

bool activation_feasible(const Network& net, EdgeMask activation,
                         Interference model = Interference::Primary);

// Feasibility of activation ∪ {extra} given activation is already feasible.
bool activation_extend_ok(const Network& net, EdgeMask activation, int extra,
                          Interference model = Interference::Primary);

// DAGCAST_MATCH_LIMIT overrides the 10^6 default enumeration guard.
std::size_t default_matching_limit();

// All feasible activations that use only edges in `on`, including the empty
// one, in ascending numeric mask order. Throws TooManyMatchings past `limit`.
std::vector<EdgeMask> enumerate_matchings(const Network& net, EdgeMask on, std::size_t limit);
std::vector<EdgeMask> enumerate_matchings(const Network& net, EdgeMask on);

// 0/1 indicator over edges; the flow into a node set, capacities applied by
// the consumer.
struct CutVector {
  std::vector<std::int64_t> w;
};

// Indicator of the in-edges of v. v must not be the source.
CutVector single_node_cut(const Network& net, int v);

// One cut per nonempty subset U of the non-source nodes: indicator of edges
// from outside U into U. Ordered by the subset's rank in the ascending
// bitmask order over non-source nodes (ascending node id = ascending bit).
// Throws TooManyCuts when the network has more than max_nodes nodes.
std::vector<CutVector> all_proper_cuts(const Network& net, int max_nodes = 20);

// Deterministic Kahn order: among ready nodes, smallest id first. The source
// always comes out first on a valid network.
std::vector<int> topological_order(const Network& net);

}  // namespace dagcast
