#pragma once

#include <cstddef>
#include <cstdint>

namespace loadseg {

// SplitMix64 finalizer; used to derive independent stream seeds from a base
// seed and a stream index.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Small deterministic generator (xoshiro256**). All distributions are
// implemented here rather than via <random> so that streams are identical
// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n). Requires n > 0.
  std::size_t index(std::size_t n);
  // Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi);
  double normal();
  double normal(double mu, double sigma) { return mu + sigma * normal(); }
  unsigned poisson(double lambda);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace loadseg
