#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "errors.hpp"

namespace dagcast {

// Stateless mixer used to derive independent substream seeds from one master
// seed. Constants are the reference splitmix64 ones.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One named random stream. Streams for arrivals, link states, policy
// randomization and view updates are derived separately so that policies fed
// the same master seed see identical arrival and link sequences.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : eng_(seed) {}

  // Derivation is a two-step splitmix chain: mixing the master with a stream
  // tag, then with the run index. Any (master, tag, run) triple is stable
  // across platforms because mt19937_64 output is pinned by the standard.
  static RngStream derive(std::uint64_t master, std::uint64_t stream_tag, std::uint64_t run = 0) {
    return RngStream(splitmix64(splitmix64(master ^ stream_tag) + run));
  }

  std::uint64_t bits() { return eng_(); }

  // Uniform in [0,1) with 53 significant bits; avoids libstdc++-specific
  // distribution internals so sequences are identical everywhere.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 eng_;
};

// Stream tags; arbitrary distinct constants.
inline constexpr std::uint64_t kStreamArrivals = 0xA1ull;
inline constexpr std::uint64_t kStreamConfig = 0xC0ull;
inline constexpr std::uint64_t kStreamPolicy = 0xB2ull;
inline constexpr std::uint64_t kStreamView = 0xD4ull;

// Inversion sampler; consumes exactly one uniform per call so parallel
// policies stay aligned slot by slot.
inline std::int64_t sample_poisson(RngStream& rng, double mean) {
  if (mean < 0.0) fail(Err::Input, "poisson mean must be nonnegative");
  if (mean == 0.0) {
    (void)rng.uniform();
    return 0;
  }
  double u = rng.uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::int64_t k = 0;
  // mean is a per-slot arrival rate, small in practice; the loop is short.
  while (u >= cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
    if (k > 1000000) fail(Err::Input, "poisson mean too large");
  }
  return k;
}

}  // namespace dagcast
