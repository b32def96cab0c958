#include "graph.hpp"

#include <algorithm>
#include <bit>
#include <bitset>
#include <cstdlib>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace dagcast {

namespace {

// Nodes are bounded by edges + 1 (every non-source node has an in-edge), so
// 64 edges cap the node count at 65.
constexpr int kMaxEdges = 64;
constexpr std::size_t kDefaultMatchLimit = 1000000;

void check_acyclic(const Network& net) {
  // Iterative DFS with coloring; a gray target identifies a back edge.
  enum : unsigned char { White, Gray, Black };
  const int n = net.node_count();
  std::vector<unsigned char> color(static_cast<std::size_t>(n), White);
  std::vector<std::pair<int, std::size_t>> stack;
  for (int start = 0; start < n; ++start) {
    if (color[static_cast<std::size_t>(start)] != White) continue;
    stack.emplace_back(start, 0);
    color[static_cast<std::size_t>(start)] = Gray;
    while (!stack.empty()) {
      auto& [v, idx] = stack.back();
      const auto& outs = net.out_edges(v);
      if (idx == outs.size()) {
        color[static_cast<std::size_t>(v)] = Black;
        stack.pop_back();
        continue;
      }
      int e = outs[idx++];
      int w = net.edge(e).dst;
      if (color[static_cast<std::size_t>(w)] == Gray) {
        fail(Err::Cycle, "cycle through edge " + net.node_name(v) + "->" + net.node_name(w));
      }
      if (color[static_cast<std::size_t>(w)] == White) {
        color[static_cast<std::size_t>(w)] = Gray;
        stack.emplace_back(w, 0);
      }
    }
  }
}

void check_reachable(const Network& net) {
  const int n = net.node_count();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::queue<int> q;
  q.push(net.source());
  seen[static_cast<std::size_t>(net.source())] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int e : net.out_edges(v)) {
      int w = net.edge(e).dst;
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        q.push(w);
      }
    }
  }
  for (int v = 0; v < n; ++v) {
    if (!seen[static_cast<std::size_t>(v)]) {
      fail(Err::Unreachable, "node " + net.node_name(v) + " not reachable from the source");
    }
  }
}

}  // namespace

Network Network::build(const std::vector<std::string>& names, const std::string& source,
                       const std::vector<NamedEdge>& named_edges) {
  Network net;
  if (names.size() < 2) fail(Err::Input, "need at least 2 nodes");
  std::unordered_map<std::string, int> ids;
  ids.reserve(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i].empty()) fail(Err::Input, "empty node name");
    if (!ids.emplace(names[i], static_cast<int>(i)).second) {
      fail(Err::Input, "duplicate node name: " + names[i]);
    }
  }
  auto src_it = ids.find(source);
  if (src_it == ids.end()) fail(Err::Input, "source node not in node list: " + source);
  net.names_ = names;
  net.source_ = src_it->second;

  if (named_edges.empty()) fail(Err::Input, "need at least 1 edge");
  if (named_edges.size() > kMaxEdges) {
    fail(Err::TooManyEdges, "edge count " + std::to_string(named_edges.size()) +
                                " exceeds the 64-edge limit");
  }
  net.edges_.reserve(named_edges.size());
  for (const auto& ne : named_edges) {
    auto s = ids.find(ne.src);
    auto d = ids.find(ne.dst);
    if (s == ids.end()) fail(Err::Input, "edge references unknown node: " + ne.src);
    if (d == ids.end()) fail(Err::Input, "edge references unknown node: " + ne.dst);
    if (s->second == d->second) fail(Err::Cycle, "self-loop at node " + ne.src);
    if (ne.cap < 1) {
      fail(Err::BadCapacity, "edge " + ne.src + "->" + ne.dst + " capacity must be >= 1");
    }
    net.edges_.push_back(Edge{s->second, d->second, ne.cap});
  }
  std::sort(net.edges_.begin(), net.edges_.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
  });
  for (std::size_t i = 1; i < net.edges_.size(); ++i) {
    if (net.edges_[i - 1].src == net.edges_[i].src && net.edges_[i - 1].dst == net.edges_[i].dst) {
      fail(Err::DuplicateEdge, "duplicate edge " + names[static_cast<std::size_t>(net.edges_[i].src)] +
                                   "->" + names[static_cast<std::size_t>(net.edges_[i].dst)]);
    }
  }

  const int n = net.node_count();
  net.in_edges_.assign(static_cast<std::size_t>(n), {});
  net.out_edges_.assign(static_cast<std::size_t>(n), {});
  net.in_mask_.assign(static_cast<std::size_t>(n), 0);
  net.out_mask_.assign(static_cast<std::size_t>(n), 0);
  for (int e = 0; e < net.edge_count(); ++e) {
    const Edge& ed = net.edge(e);
    net.in_edges_[static_cast<std::size_t>(ed.dst)].push_back(e);
    net.out_edges_[static_cast<std::size_t>(ed.src)].push_back(e);
    net.in_mask_[static_cast<std::size_t>(ed.dst)] |= EdgeMask{1} << e;
    net.out_mask_[static_cast<std::size_t>(ed.src)] |= EdgeMask{1} << e;
    net.max_cap_ = std::max(net.max_cap_, ed.cap);
  }
  if (!net.in_edges_[static_cast<std::size_t>(net.source_)].empty()) {
    // Redundant with the cycle check (an in-edge at the source implies a
    // cycle once reachability holds) but gives a clearer message.
    fail(Err::Cycle, "source node has an incoming edge");
  }

  check_acyclic(net);
  check_reachable(net);
  return net;
}

int Network::node_id(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

bool activation_feasible(const Network& net, EdgeMask activation, Interference model) {
  (void)model;
  if ((activation & ~net.full_mask()) != 0) return false;
  std::bitset<128> used;
  EdgeMask rest = activation;
  while (rest != 0) {
    int e = std::countr_zero(rest);
    rest &= rest - 1;
    const Edge& ed = net.edge(e);
    if (used.test(static_cast<std::size_t>(ed.src)) || used.test(static_cast<std::size_t>(ed.dst)))
      return false;
    used.set(static_cast<std::size_t>(ed.src));
    used.set(static_cast<std::size_t>(ed.dst));
  }
  return true;
}

bool activation_extend_ok(const Network& net, EdgeMask activation, int extra, Interference model) {
  (void)model;
  const Edge& ed = net.edge(extra);
  return (activation & net.incident_mask(ed.src)) == 0 &&
         (activation & net.incident_mask(ed.dst)) == 0;
}

std::size_t default_matching_limit() {
  const char* env = std::getenv("DAGCAST_MATCH_LIMIT");
  if (env == nullptr || *env == '\0') return kDefaultMatchLimit;
  char* end = nullptr;
  unsigned long long v = std::strtoull(env, &end, 10);
  if (end == nullptr || *end != '\0' || v == 0) {
    fail(Err::Input, "DAGCAST_MATCH_LIMIT must be a positive integer");
  }
  return static_cast<std::size_t>(v);
}

std::vector<EdgeMask> enumerate_matchings(const Network& net, EdgeMask on, std::size_t limit) {
  if ((on & ~net.full_mask()) != 0) fail(Err::Input, "configuration mask has unknown edge bits");
  std::vector<int> edges;
  EdgeMask rest = on;
  while (rest != 0) {
    edges.push_back(std::countr_zero(rest));
    rest &= rest - 1;
  }
  std::vector<EdgeMask> out;
  out.push_back(0);
  // Backtracking over edges in ascending index order; every prefix is
  // feasible, so each extension needs only the incremental predicate.
  std::vector<std::pair<std::size_t, EdgeMask>> stack;
  stack.emplace_back(0, 0);
  while (!stack.empty()) {
    auto [start, cur] = stack.back();
    stack.pop_back();
    for (std::size_t i = start; i < edges.size(); ++i) {
      if (!activation_extend_ok(net, cur, edges[i])) continue;
      EdgeMask ext = cur | (EdgeMask{1} << edges[i]);
      if (out.size() == limit) {
        fail(Err::TooManyMatchings,
             "more than " + std::to_string(limit) +
                 " matchings; raise DAGCAST_MATCH_LIMIT to enumerate anyway");
      }
      out.push_back(ext);
      stack.emplace_back(i + 1, ext);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<EdgeMask> enumerate_matchings(const Network& net, EdgeMask on) {
  return enumerate_matchings(net, on, default_matching_limit());
}

CutVector single_node_cut(const Network& net, int v) {
  if (v == net.source()) fail(Err::SourceCut, "no cut for the source node");
  if (v < 0 || v >= net.node_count()) fail(Err::Input, "node id out of range");
  CutVector cut;
  cut.w.assign(static_cast<std::size_t>(net.edge_count()), 0);
  for (int e : net.in_edges(v)) cut.w[static_cast<std::size_t>(e)] = 1;
  return cut;
}

std::vector<CutVector> all_proper_cuts(const Network& net, int max_nodes) {
  if (net.node_count() > max_nodes) {
    fail(Err::TooManyCuts, "proper cut enumeration limited to " + std::to_string(max_nodes) +
                               " nodes");
  }
  std::vector<int> non_source;
  for (int v = 0; v < net.node_count(); ++v) {
    if (v != net.source()) non_source.push_back(v);
  }
  const std::size_t k = non_source.size();
  std::vector<char> in_set(static_cast<std::size_t>(net.node_count()), 0);
  std::vector<CutVector> cuts;
  cuts.reserve((std::size_t{1} << k) - 1);
  for (std::uint64_t sel = 1; sel < (std::uint64_t{1} << k); ++sel) {
    for (std::size_t i = 0; i < k; ++i) {
      in_set[static_cast<std::size_t>(non_source[i])] = (sel >> i) & 1 ? 1 : 0;
    }
    CutVector cut;
    cut.w.assign(static_cast<std::size_t>(net.edge_count()), 0);
    for (int e = 0; e < net.edge_count(); ++e) {
      const Edge& ed = net.edge(e);
      if (!in_set[static_cast<std::size_t>(ed.src)] && in_set[static_cast<std::size_t>(ed.dst)]) {
        cut.w[static_cast<std::size_t>(e)] = 1;
      }
    }
    cuts.push_back(std::move(cut));
  }
  return cuts;
}

std::vector<int> topological_order(const Network& net) {
  const int n = net.node_count();
  std::vector<int> indeg(static_cast<std::size_t>(n), 0);
  for (const Edge& ed : net.edges()) indeg[static_cast<std::size_t>(ed.dst)]++;
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (int v = 0; v < n; ++v) {
    if (indeg[static_cast<std::size_t>(v)] == 0) ready.push(v);
  }
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int e : net.out_edges(v)) {
      int w = net.edge(e).dst;
      if (--indeg[static_cast<std::size_t>(w)] == 0) ready.push(w);
    }
  }
  if (order.size() != static_cast<std::size_t>(n)) fail(Err::Cycle, "graph has a cycle");
  return order;
}

}  // namespace dagcast
