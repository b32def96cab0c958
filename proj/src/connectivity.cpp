#include "connectivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace dagcast {

namespace {

constexpr double kProbTol = 1e-12;

// Forward BFS over positive-probability transitions.
std::vector<char> reach(const std::vector<std::vector<double>>& t, int start, bool reversed) {
  const int k = static_cast<int>(t.size());
  std::vector<char> seen(static_cast<std::size_t>(k), 0);
  std::queue<int> q;
  q.push(start);
  seen[static_cast<std::size_t>(start)] = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v = 0; v < k; ++v) {
      double p = reversed ? t[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)]
                          : t[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
      if (p > 0.0 && !seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        q.push(v);
      }
    }
  }
  return seen;
}

// Period of an irreducible chain: gcd of (level[u] + 1 - level[v]) over
// positive transitions, with levels from any BFS tree.
long long chain_period(const std::vector<std::vector<double>>& t) {
  const int k = static_cast<int>(t.size());
  std::vector<long long> level(static_cast<std::size_t>(k), -1);
  std::queue<int> q;
  q.push(0);
  level[0] = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v = 0; v < k; ++v) {
      if (t[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] > 0.0 &&
          level[static_cast<std::size_t>(v)] < 0) {
        level[static_cast<std::size_t>(v)] = level[static_cast<std::size_t>(u)] + 1;
        q.push(v);
      }
    }
  }
  long long g = 0;
  for (int u = 0; u < k; ++u) {
    for (int v = 0; v < k; ++v) {
      if (t[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] > 0.0) {
        g = std::gcd(g, level[static_cast<std::size_t>(u)] + 1 - level[static_cast<std::size_t>(v)]);
      }
    }
  }
  return g == 0 ? 1 : std::llabs(g);
}

void check_masks_known(const Network& net, const std::vector<EdgeMask>& masks) {
  for (EdgeMask m : masks) {
    if ((m & ~net.full_mask()) != 0) fail(Err::Input, "configuration mask has unknown edge bits");
  }
}

}  // namespace

void validate_config_table(const Network& net, const ConfigTable& table) {
  if (table.masks.size() != table.probs.size()) fail(Err::Input, "table masks/probs length mismatch");
  if (table.masks.empty()) fail(Err::Input, "empty configuration table");
  check_masks_known(net, table.masks);
  double sum = 0.0;
  for (double p : table.probs) {
    if (!(p > 0.0)) fail(Err::Input, "configuration probabilities must be positive");
    if (p > 1.0) fail(Err::Input, "configuration probability above 1");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbTol) fail(Err::Input, "configuration probabilities must sum to 1");
  std::vector<EdgeMask> sorted = table.masks;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    fail(Err::Input, "duplicate configuration mask in table");
  }
}

void validate_iid(const Network& net, const IidLinkProcess& proc) {
  if (proc.p.size() != static_cast<std::size_t>(net.edge_count())) {
    fail(Err::Input, "iid process needs one probability per edge");
  }
  for (double p : proc.p) {
    if (!(p > 0.0) || p > 1.0) fail(Err::Input, "edge ON probability must be in (0, 1]");
  }
}

bool uniform_marginal(const IidLinkProcess& proc) {
  for (double p : proc.p) {
    if (p != proc.p[0]) return false;
  }
  return true;
}

void validate_markov(const Network& net, const MarkovConfigProcess& proc) {
  const std::size_t k = proc.states.size();
  if (k == 0) fail(Err::Input, "markov process needs at least one state");
  check_masks_known(net, proc.states);
  std::vector<EdgeMask> sorted = proc.states;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    fail(Err::Input, "duplicate markov state mask");
  }
  if (proc.transition.size() != k) fail(Err::Input, "transition matrix must be square over states");
  for (const auto& row : proc.transition) {
    if (row.size() != k) fail(Err::Input, "transition matrix must be square over states");
    double sum = 0.0;
    for (double p : row) {
      if (p < 0.0 || p > 1.0) fail(Err::Input, "transition probability out of [0, 1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kProbTol) fail(Err::Input, "transition rows must sum to 1");
  }
  if (proc.initial < 0 || static_cast<std::size_t>(proc.initial) >= k) {
    fail(Err::Input, "markov initial state out of range");
  }
  auto fwd = reach(proc.transition, 0, false);
  auto bwd = reach(proc.transition, 0, true);
  for (std::size_t i = 0; i < k; ++i) {
    if (!fwd[i] || !bwd[i]) fail(Err::NonErgodicChain, "markov chain is not irreducible");
  }
  if (chain_period(proc.transition) != 1) fail(Err::NonErgodicChain, "markov chain is periodic");
}

void validate_process(const Network& net, const ConfigProcess& proc) {
  std::visit([&](const auto& p) {
    using T = std::decay_t<decltype(p)>;
    if constexpr (std::is_same_v<T, ConfigTable>) validate_config_table(net, p);
    else if constexpr (std::is_same_v<T, IidLinkProcess>) validate_iid(net, p);
    else validate_markov(net, p);
  }, proc);
}

ConfigSampler::ConfigSampler(const Network& net, ConfigProcess proc)
    : proc_(std::move(proc)), state_(0) {
  validate_process(net, proc_);
  if (const auto* mk = std::get_if<MarkovConfigProcess>(&proc_)) state_ = mk->initial;
}

EdgeMask ConfigSampler::next(RngStream& rng) {
  if (const auto* table = std::get_if<ConfigTable>(&proc_)) {
    double u = rng.uniform();
    double cdf = 0.0;
    for (std::size_t i = 0; i < table->probs.size(); ++i) {
      cdf += table->probs[i];
      if (u < cdf) return table->masks[i];
    }
    return table->masks.back();
  }
  if (const auto* iid = std::get_if<IidLinkProcess>(&proc_)) {
    EdgeMask sigma = 0;
    for (std::size_t e = 0; e < iid->p.size(); ++e) {
      if (rng.uniform() < iid->p[e]) sigma |= EdgeMask{1} << e;
    }
    return sigma;
  }
  const auto& mk = std::get<MarkovConfigProcess>(proc_);
  EdgeMask sigma = mk.states[static_cast<std::size_t>(state_)];
  const auto& row = mk.transition[static_cast<std::size_t>(state_)];
  double u = rng.uniform();
  double cdf = 0.0;
  int nxt = static_cast<int>(row.size()) - 1;
  for (std::size_t j = 0; j < row.size(); ++j) {
    cdf += row[j];
    if (u < cdf) {
      nxt = static_cast<int>(j);
      break;
    }
  }
  state_ = nxt;
  return sigma;
}

ConfigTable stationary_distribution(const Network& net, const ConfigProcess& proc,
                                    std::size_t table_limit) {
  validate_process(net, proc);
  if (const auto* table = std::get_if<ConfigTable>(&proc)) {
    if (table->masks.size() > table_limit) fail(Err::TableTooLarge, "configuration table too large");
    return *table;
  }
  if (const auto* iid = std::get_if<IidLinkProcess>(&proc)) {
    const std::size_t m = iid->p.size();
    if (m >= 63 || (std::size_t{1} << m) > table_limit) {
      fail(Err::TableTooLarge, "iid law over " + std::to_string(m) +
                                   " edges exceeds the explicit-table limit of " +
                                   std::to_string(table_limit));
    }
    ConfigTable out;
    for (EdgeMask mask = 0; mask < (EdgeMask{1} << m); ++mask) {
      double prob = 1.0;
      for (std::size_t e = 0; e < m; ++e) {
        prob *= ((mask >> e) & 1) ? iid->p[e] : 1.0 - iid->p[e];
      }
      if (prob > 0.0) {
        out.masks.push_back(mask);
        out.probs.push_back(prob);
      }
    }
    return out;
  }
  const auto& mk = std::get<MarkovConfigProcess>(proc);
  const std::size_t k = mk.states.size();
  if (k > table_limit) fail(Err::TableTooLarge, "markov state set too large");
  std::vector<double> pi(k, 1.0 / static_cast<double>(k));
  std::vector<double> nxt(k, 0.0);
  bool converged = false;
  for (std::size_t it = 0; it < 1000000 && !converged; ++it) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) nxt[j] += pi[i] * mk.transition[i][j];
    }
    double norm = std::accumulate(nxt.begin(), nxt.end(), 0.0);
    double resid = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      nxt[j] /= norm;
      resid = std::max(resid, std::abs(nxt[j] - pi[j]));
    }
    pi.swap(nxt);
    converged = resid <= 1e-14;
  }
  if (!converged) fail(Err::LpNumericalFailure, "stationary distribution iteration did not converge");
  ConfigTable out;
  out.masks = mk.states;
  out.probs = pi;
  return out;
}

}  // namespace dagcast
