#pragma once

// Templated core of the capacity solver: one LP over the matching hulls of
// each configuration, instantiated with double for the production path and
// with an exact rational type when tests re-derive golden values.

#include <string>
#include <utility>
#include <vector>

#include "connectivity.hpp"
#include "graph.hpp"
#include "simplex.hpp"

namespace dagcast {

template <typename F>
struct CapacityLpSolution {
  F lambda = F(0);
  // Per configuration: (activation, weight) with positive weights summing
  // to 1, ascending mask order.
  std::vector<std::vector<std::pair<EdgeMask, F>>> per_config;
  // Probability-weighted expected service rate per edge (capacity applied).
  std::vector<F> edge_rate;
  // Rate across each cut, aligned with the cut list handed in.
  std::vector<F> cut_rates;
};

// Maximize the injection rate subject to: rate <= flow across every cut in
// `cuts`, where flow comes from a convex combination over each
// configuration's matchings, mixed by the configuration probabilities.
// The variable layout is [rate, weights of config 0's matchings, ...].
template <typename F>
CapacityLpSolution<F> solve_capacity_lp(const Network& net, const std::vector<EdgeMask>& masks,
                                        const std::vector<F>& probs,
                                        const std::vector<CutVector>& cuts,
                                        std::size_t match_limit) {
  const std::size_t n_cfg = masks.size();
  std::vector<std::vector<EdgeMask>> matchings(n_cfg);
  std::size_t cols = 1;
  for (std::size_t s = 0; s < n_cfg; ++s) {
    matchings[s] = enumerate_matchings(net, masks[s], match_limit);
    cols += matchings[s].size();
    if (cols > match_limit) {
      fail(Err::TooManyMatchings, "capacity LP would need " + std::to_string(cols) +
                                      " columns; raise DAGCAST_MATCH_LIMIT if intended");
    }
  }
  const std::size_t rows = cuts.size() + n_cfg;
  // The dense tableau is the memory hog; keep it inside ~1.5e8 cells.
  if ((rows + 1) * (cols + rows + 2) > 150000000ull) {
    fail(Err::TooManyMatchings, "capacity LP tableau too large");
  }

  LpProblem<F> lp(static_cast<int>(cols));
  lp.set_objective(0, F(1));

  for (std::size_t ci = 0; ci < cuts.size(); ++ci) {
    const CutVector& cut = cuts[ci];
    std::vector<std::pair<int, F>> terms;
    terms.emplace_back(0, F(1));
    int col = 1;
    for (std::size_t s = 0; s < n_cfg; ++s) {
      for (const EdgeMask mk : matchings[s]) {
        F served = F(0);
        EdgeMask rest = mk;
        while (rest != 0) {
          int e = std::countr_zero(rest);
          rest &= rest - 1;
          if (cut.w[static_cast<std::size_t>(e)] != 0) {
            served = served + F(cut.w[static_cast<std::size_t>(e)]) * F(net.cap(e));
          }
        }
        if (served != F(0)) terms.emplace_back(col, -probs[s] * served);
        ++col;
      }
    }
    lp.add_row(std::move(terms), RowSense::Le, F(0));
  }
  {
    int col = 1;
    for (std::size_t s = 0; s < n_cfg; ++s) {
      std::vector<std::pair<int, F>> terms;
      terms.reserve(matchings[s].size());
      for (std::size_t k = 0; k < matchings[s].size(); ++k) {
        terms.emplace_back(col++, F(1));
      }
      lp.add_row(std::move(terms), RowSense::Eq, F(1));
    }
  }

  LpResult<F> res = lp.solve();
  if (res.status != LpStatus::Optimal) {
    fail(Err::LpNumericalFailure, "capacity LP did not reach an optimum");
  }

  const F weight_floor = std::is_same_v<F, double> ? F(1e-12) : F(0);
  CapacityLpSolution<F> out;
  out.lambda = res.x[0];
  out.per_config.resize(n_cfg);
  out.edge_rate.assign(static_cast<std::size_t>(net.edge_count()), F(0));
  {
    std::size_t col = 1;
    for (std::size_t s = 0; s < n_cfg; ++s) {
      F total = F(0);
      for (std::size_t k = 0; k < matchings[s].size(); ++k, ++col) {
        const F& w = res.x[col];
        if (w > weight_floor) {
          out.per_config[s].emplace_back(matchings[s][k], w);
          total = total + w;
        }
      }
      for (auto& [mk, w] : out.per_config[s]) {
        w = w / total;
        EdgeMask rest = mk;
        while (rest != 0) {
          int e = std::countr_zero(rest);
          rest &= rest - 1;
          out.edge_rate[static_cast<std::size_t>(e)] =
              out.edge_rate[static_cast<std::size_t>(e)] + probs[s] * w * F(net.cap(e));
        }
      }
    }
  }
  out.cut_rates.reserve(cuts.size());
  for (const CutVector& cut : cuts) {
    F rate = F(0);
    for (int e = 0; e < net.edge_count(); ++e) {
      if (cut.w[static_cast<std::size_t>(e)] != 0) {
        rate = rate + F(cut.w[static_cast<std::size_t>(e)]) * out.edge_rate[static_cast<std::size_t>(e)];
      }
    }
    out.cut_rates.push_back(std::move(rate));
  }
  return out;
}

}  // namespace dagcast
