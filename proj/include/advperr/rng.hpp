#pragma once

#include <cstdint>

namespace advperr {

// Deterministic random stream. All sampling in the project goes through this
// class so that results are reproducible byte-for-byte for a given seed,
// independent of standard-library distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // Warm up so nearby seeds decorrelate.
    next_u64();
    next_u64();
  }

  std::uint64_t next_u64();

  // Uniform in [0, 1).
  double uniform();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi);

  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller (no cached spare; two uniforms per draw).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Gamma(shape, scale) via Marsaglia-Tsang.
  double gamma(double shape, double scale);

  double chi_squared(double dof) { return gamma(0.5 * dof, 2.0); }

 private:
  std::uint64_t state_;
};

// Derives an independent stream seed from a base seed and stream indices
// (splitmix-style hash). Used to give parallel proposal scoring per-proposal
// streams that do not depend on evaluation order.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace advperr
