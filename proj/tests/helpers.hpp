#pragma once

// Shared instance builders and independent oracles for the test suites. The
// oracles deliberately avoid the library's own routines: counting by subset
// filtering here vs backtracking in the library, and so on.

#include <cstdint>
#include <string>
#include <vector>

#include "connectivity.hpp"
#include "graph.hpp"
#include "rng.hpp"

namespace dagcast::testing {

inline Network two_link_net() {
  return Network::build({"r", "a", "b"}, "r",
                        {{"r", "a", 1}, {"r", "b", 1}});
}

inline Network chain3_net() {
  return Network::build({"r", "a", "b"}, "r",
                        {{"r", "a", 1}, {"a", "b", 1}});
}

// 3x3 grid, node rows (r a b / c d e / f g h), unit capacities, all edges
// pointing right or down.
inline Network grid3x3_net() {
  return Network::build({"r", "a", "b", "c", "d", "e", "f", "g", "h"}, "r",
                        {{"r", "a", 1},
                         {"a", "b", 1},
                         {"r", "c", 1},
                         {"a", "d", 1},
                         {"b", "e", 1},
                         {"c", "d", 1},
                         {"d", "e", 1},
                         {"c", "f", 1},
                         {"d", "g", 1},
                         {"e", "h", 1},
                         {"f", "g", 1},
                         {"g", "h", 1}});
}

inline Network diamond_net() {
  return Network::build({"r", "a", "b", "t"}, "r",
                        {{"r", "a", 1}, {"r", "b", 1}, {"a", "t", 1}, {"b", "t", 1}});
}

// Subset-filter matching counter; O(2^m * k^2), test-only.
inline std::size_t count_matchings_bruteforce(const Network& net, EdgeMask on) {
  const int m = net.edge_count();
  std::size_t count = 0;
  const EdgeMask top = (m == 64) ? ~EdgeMask{0} : ((EdgeMask{1} << m) - 1);
  for (EdgeMask s = 0;; ++s) {
    if ((s & ~on) == 0) {
      std::vector<int> ends;
      for (int e = 0; e < m; ++e) {
        if ((s >> e) & 1) {
          ends.push_back(net.edge(e).src);
          ends.push_back(net.edge(e).dst);
        }
      }
      bool ok = true;
      for (std::size_t i = 0; i < ends.size() && ok; ++i) {
        for (std::size_t j = i + 1; j < ends.size(); ++j) {
          if (ends[i] == ends[j]) {
            ok = false;
            break;
          }
        }
      }
      if (ok) ++count;
    }
    if (s == top) break;
  }
  return count;
}

// Random connected DAG in topological labeling: node v>0 gets one guaranteed
// in-edge from a lower id, plus extras with probability edge_prob.
inline Network random_dag(RngStream& rng, int n, double edge_prob, std::int64_t max_cap = 1) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) names.push_back("n" + std::to_string(i));
  std::vector<std::vector<char>> present(static_cast<std::size_t>(n),
                                         std::vector<char>(static_cast<std::size_t>(n), 0));
  for (int v = 1; v < n; ++v) {
    int u = static_cast<int>(rng.uniform() * v);
    if (u >= v) u = v - 1;
    present[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = 1;
  }
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (!present[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] &&
          rng.uniform() < edge_prob) {
        present[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = 1;
      }
    }
  }
  std::vector<NamedEdge> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (present[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]) {
        std::int64_t cap = 1 + static_cast<std::int64_t>(rng.uniform() * static_cast<double>(max_cap));
        if (cap > max_cap) cap = max_cap;
        edges.push_back({names[static_cast<std::size_t>(u)], names[static_cast<std::size_t>(v)], cap});
      }
    }
  }
  return Network::build(names, names[0], edges);
}

// k distinct random masks with positive normalized probabilities.
inline ConfigTable random_table(RngStream& rng, const Network& net, int k) {
  ConfigTable t;
  while (static_cast<int>(t.masks.size()) < k) {
    EdgeMask m = rng.bits() & net.full_mask();
    bool dup = false;
    for (EdgeMask seen : t.masks) dup = dup || seen == m;
    if (!dup) t.masks.push_back(m);
  }
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    t.probs.push_back(0.05 + rng.uniform());
    sum += t.probs.back();
  }
  for (double& p : t.probs) p /= sum;
  // Renormalize the tail so the sum is exact.
  double head = 0.0;
  for (int i = 0; i + 1 < k; ++i) head += t.probs[static_cast<std::size_t>(i)];
  t.probs.back() = 1.0 - head;
  return t;
}

// Every connected DAG on n nodes in topological labeling: node 0 is the
// source and edges only point from lower to higher id. Unit capacities.
inline std::vector<Network> enumerate_small_dags(int n) {
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) slots.emplace_back(i, j);
  }
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("n" + std::to_string(i));
  std::vector<Network> out;
  for (std::uint64_t sel = 1; sel < (std::uint64_t{1} << slots.size()); ++sel) {
    std::vector<NamedEdge> edges;
    for (std::size_t s = 0; s < slots.size(); ++s) {
      if ((sel >> s) & 1) {
        edges.push_back({names[static_cast<std::size_t>(slots[s].first)],
                         names[static_cast<std::size_t>(slots[s].second)], 1});
      }
    }
    try {
      out.push_back(Network::build(names, "n0", edges));
    } catch (const Error&) {
      // Disconnected labelings are skipped; every DAG shape appears under
      // some topological labeling, so coverage is complete up to renaming.
    }
  }
  return out;
}

}  // namespace dagcast::testing
