#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "graph.hpp"
#include "rng.hpp"

namespace dagcast {

// Explicit law over configurations. Entries strictly positive (zero rows are
// dropped before validation), probabilities sum to 1 within 1e-12, masks
// pairwise distinct.
struct ConfigTable {
  std::vector<EdgeMask> masks;
  std::vector<double> probs;
};

void validate_config_table(const Network& net, const ConfigTable& table);

// Edges go ON independently each slot; p indexed by canonical edge id, each
// in (0, 1].
struct IidLinkProcess {
  std::vector<double> p;
};

void validate_iid(const Network& net, const IidLinkProcess& proc);

// True when every edge shares one ON probability (premise for the capacity
// sandwich bounds).
bool uniform_marginal(const IidLinkProcess& proc);

// Chain over configuration states; must be ergodic (irreducible and
// aperiodic), rows stochastic within 1e-12, states distinct.
struct MarkovConfigProcess {
  std::vector<EdgeMask> states;
  std::vector<std::vector<double>> transition;
  int initial = 0;
};

void validate_markov(const Network& net, const MarkovConfigProcess& proc);

using ConfigProcess = std::variant<ConfigTable, IidLinkProcess, MarkovConfigProcess>;

void validate_process(const Network& net, const ConfigProcess& proc);

// Draws the configuration sequence sigma(1), sigma(2), ... one slot per
// call. Exactly one uniform per call for table and markov flavors, one per
// edge for iid, so seeds line up across policies run on the same process.
// For markov, slot 1 is the declared initial state and the chain steps after
// each call.
class ConfigSampler {
 public:
  ConfigSampler(const Network& net, ConfigProcess proc);
  EdgeMask next(RngStream& rng);

 private:
  ConfigProcess proc_;
  int state_;
};

inline constexpr std::size_t kDefaultTableLimit = 65536;

// The process's stationary law as an explicit table. Table flavor: returned
// as is. Iid: the product law expanded over all 2^m configurations (refused
// past table_limit), zero-probability entries dropped, ascending mask order.
// Markov: power iteration on a validated ergodic chain, states in declared
// order.
ConfigTable stationary_distribution(const Network& net, const ConfigProcess& proc,
                                    std::size_t table_limit = kDefaultTableLimit);

}  // namespace dagcast
