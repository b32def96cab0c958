#include "capacity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "capacity_lp.hpp"

namespace dagcast {

namespace {

std::vector<CutVector> node_cuts(const Network& net, std::vector<int>& cut_node) {
  std::vector<CutVector> cuts;
  cut_node.clear();
  for (int v = 0; v < net.node_count(); ++v) {
    if (v == net.source()) continue;
    cuts.push_back(single_node_cut(net, v));
    cut_node.push_back(v);
  }
  return cuts;
}

CapacityResult assemble(const Network& net, const CapacityLpSolution<double>& sol,
                        const std::vector<int>& cut_node) {
  CapacityResult out;
  out.lambda_star = sol.lambda;
  out.per_config.reserve(sol.per_config.size());
  for (const auto& dist : sol.per_config) {
    ActivationDist d;
    d.masks.reserve(dist.size());
    d.weights.reserve(dist.size());
    for (const auto& [mask, w] : dist) {
      d.masks.push_back(mask);
      d.weights.push_back(w);
    }
    out.per_config.push_back(std::move(d));
  }
  out.edge_rate = sol.edge_rate;
  out.node_cut_rate.assign(static_cast<std::size_t>(net.node_count()),
                           std::numeric_limits<double>::infinity());
  double min_rate = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cut_node.size(); ++i) {
    out.node_cut_rate[static_cast<std::size_t>(cut_node[i])] = sol.cut_rates[i];
    min_rate = std::min(min_rate, sol.cut_rates[i]);
  }
  if (std::abs(min_rate - sol.lambda) > 1e-6 * std::max(1.0, std::abs(sol.lambda))) {
    fail(Err::LpNumericalFailure, "optimum does not meet the bottleneck cut");
  }
  const double tight_tol = 1e-9 * std::max(1.0, std::abs(min_rate)) + 1e-12;
  for (int v = 0; v < net.node_count(); ++v) {
    if (v == net.source()) continue;
    if (std::abs(out.node_cut_rate[static_cast<std::size_t>(v)] - min_rate) <= tight_tol) {
      out.tight_nodes.push_back(v);
    }
  }
  return out;
}

}  // namespace

CapacityResult compute_capacity(const Network& net, const ConfigTable& table,
                                std::size_t match_limit) {
  validate_config_table(net, table);
  std::vector<int> cut_node;
  auto cuts = node_cuts(net, cut_node);
  auto sol = solve_capacity_lp<double>(net, table.masks, table.probs, cuts, match_limit);
  return assemble(net, sol, cut_node);
}

CapacityResult compute_capacity(const Network& net, const ConfigTable& table) {
  return compute_capacity(net, table, default_matching_limit());
}

CapacityResult compute_static_capacity(const Network& net) {
  ConfigTable table{{net.full_mask()}, {1.0}};
  return compute_capacity(net, table);
}

GeneralCutCapacity compute_capacity_general(const Network& net, const ConfigTable& table,
                                            const std::vector<CutVector>& cuts,
                                            std::size_t match_limit) {
  validate_config_table(net, table);
  for (const CutVector& c : cuts) {
    if (c.w.size() != static_cast<std::size_t>(net.edge_count())) {
      fail(Err::Input, "cut vector length must match the edge count");
    }
  }
  if (cuts.empty()) fail(Err::Input, "need at least one cut");
  auto sol = solve_capacity_lp<double>(net, table.masks, table.probs, cuts, match_limit);
  GeneralCutCapacity out;
  out.lambda = sol.lambda;
  out.cut_rates = sol.cut_rates;
  return out;
}

CapacityBounds capacity_bounds(const Network& net, double p) {
  if (!(p > 0.0) || p > 1.0) fail(Err::Input, "marginal must be in (0, 1]");
  CapacityResult stat = compute_static_capacity(net);
  return CapacityBounds{p * stat.lambda_star, stat.lambda_star, p};
}

ApproxCapacity approx_capacity(const Network& net, double p) {
  if (!(p > 0.0) || p > 1.0) fail(Err::Input, "marginal must be in (0, 1]");
  CapacityResult stat = compute_static_capacity(net);
  ApproxCapacity out;
  out.value = p * stat.lambda_star;
  out.marginal = p;
  out.certificate = stat.per_config.at(0);
  return out;
}

std::optional<PolytopeViolation> check_matching_polytope_membership(
    const Network& net, EdgeMask on, const std::vector<double>& beta, double tol, int odd_limit) {
  if (beta.size() != static_cast<std::size_t>(net.edge_count())) {
    fail(Err::Input, "beta must have one entry per edge");
  }
  if ((on & ~net.full_mask()) != 0) fail(Err::Input, "configuration mask has unknown edge bits");

  for (int e = 0; e < net.edge_count(); ++e) {
    const double v = beta[static_cast<std::size_t>(e)];
    if (((on >> e) & 1) == 0 && std::abs(v) > tol) {
      PolytopeViolation viol;
      viol.kind = PolytopeViolation::Kind::OffSupport;
      viol.edge = e;
      viol.lhs = v;
      viol.rhs = 0.0;
      return viol;
    }
  }
  for (int e = 0; e < net.edge_count(); ++e) {
    const double v = beta[static_cast<std::size_t>(e)];
    if (v < -tol) {
      PolytopeViolation viol;
      viol.kind = PolytopeViolation::Kind::Negative;
      viol.edge = e;
      viol.lhs = v;
      viol.rhs = 0.0;
      return viol;
    }
  }
  for (int v = 0; v < net.node_count(); ++v) {
    double deg = 0.0;
    EdgeMask rest = net.incident_mask(v) & on;
    while (rest != 0) {
      int e = std::countr_zero(rest);
      rest &= rest - 1;
      deg += beta[static_cast<std::size_t>(e)];
    }
    if (deg > 1.0 + tol) {
      PolytopeViolation viol;
      viol.kind = PolytopeViolation::Kind::Degree;
      viol.node = v;
      viol.lhs = deg;
      viol.rhs = 1.0;
      return viol;
    }
  }

  // Odd-set facets, restricted to nodes carrying any beta mass.
  std::vector<int> relevant;
  {
    std::vector<char> mark(static_cast<std::size_t>(net.node_count()), 0);
    for (int e = 0; e < net.edge_count(); ++e) {
      if (((on >> e) & 1) != 0 && beta[static_cast<std::size_t>(e)] > tol) {
        mark[static_cast<std::size_t>(net.edge(e).src)] = 1;
        mark[static_cast<std::size_t>(net.edge(e).dst)] = 1;
      }
    }
    for (int v = 0; v < net.node_count(); ++v) {
      if (mark[static_cast<std::size_t>(v)]) relevant.push_back(v);
    }
  }
  if (relevant.size() > static_cast<std::size_t>(odd_limit)) {
    fail(Err::TooManyOddSets, "odd-set check limited to " + std::to_string(odd_limit) +
                                  " occupied nodes, have " + std::to_string(relevant.size()));
  }
  const std::size_t k = relevant.size();
  std::vector<int> pos_in_relevant(static_cast<std::size_t>(net.node_count()), -1);
  for (std::size_t i = 0; i < k; ++i) pos_in_relevant[static_cast<std::size_t>(relevant[i])] = static_cast<int>(i);
  for (std::uint64_t sel = 1; k >= 3 && sel < (std::uint64_t{1} << k); ++sel) {
    int size = std::popcount(sel);
    if (size < 3 || size % 2 == 0) continue;
    double inside = 0.0;
    for (int e = 0; e < net.edge_count(); ++e) {
      if (((on >> e) & 1) == 0) continue;
      int ps = pos_in_relevant[static_cast<std::size_t>(net.edge(e).src)];
      int pd = pos_in_relevant[static_cast<std::size_t>(net.edge(e).dst)];
      if (ps >= 0 && pd >= 0 && ((sel >> ps) & 1) != 0 && ((sel >> pd) & 1) != 0) {
        inside += beta[static_cast<std::size_t>(e)];
      }
    }
    const double bound = static_cast<double>(size - 1) / 2.0;
    if (inside > bound + tol) {
      PolytopeViolation viol;
      viol.kind = PolytopeViolation::Kind::OddSet;
      for (std::size_t i = 0; i < k; ++i) {
        if ((sel >> i) & 1) viol.odd_set.push_back(relevant[i]);
      }
      viol.lhs = inside;
      viol.rhs = bound;
      return viol;
    }
  }
  return std::nullopt;
}

}  // namespace dagcast
