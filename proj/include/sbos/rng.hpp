#pragma once

#include <cstdint>
#include <string_view>

namespace sbos {

// Counter-seeded xoshiro256++ stream with explicit distribution samplers.
// All sampling code is self-contained so that identical seeds reproduce
// identical draws bit-for-bit across builds; <random> distributions leave
// the algorithm unspecified.
class RngStream {
 public:
  RngStream() : RngStream(0) {}
  explicit RngStream(uint64_t seed);

  uint64_t next_u64();

  // Uniform on [0,1), 53-bit resolution.
  double next_double();
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller; one draw consumes two uniforms.
  double normal();
  double normal(double mean, double sd);

  double exponential(double rate);

  // Shape/rate parameterization, Marsaglia-Tsang squeeze.
  double gamma(double shape, double rate);

  // Exact Poisson: sequential inversion below mean 10, PTRS rejection above.
  long poisson(double mean);

 private:
  uint64_t s_[4];
};

// SplitMix64 finalizer; bijective on 64-bit words.
uint64_t mix64(uint64_t x);

// Deterministic derivation of an independent stream for one
// (replication, role) pair. Distinct inputs land in distinct cells of the
// mixed 64-bit space, so parallel replications never share a stream.
RngStream derive_stream(uint64_t base_seed, uint64_t replication,
                        std::string_view role);

}  // namespace sbos
