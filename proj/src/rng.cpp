#include "sbos/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace sbos {

namespace {

inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

inline uint64_t fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

RngStream::RngStream(uint64_t seed) {
  uint64_t z = seed;
  for (auto& w : s_) {
    w = mix64(z);
    z = w;
  }
}

uint64_t RngStream::next_u64() {
  const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * next_double();
}

double RngStream::normal() {
  // u1 in (0,1] keeps the log finite.
  const double u1 = 1.0 - next_double();
  const double u2 = next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

double RngStream::normal(double mean, double sd) { return mean + sd * normal(); }

double RngStream::exponential(double rate) {
  if (rate <= 0.0) throw std::invalid_argument("exponential: rate must be > 0");
  return -std::log(1.0 - next_double()) / rate;
}

double RngStream::gamma(double shape, double rate) {
  if (shape <= 0.0 || rate <= 0.0)
    throw std::invalid_argument("gamma: shape and rate must be > 0");
  if (shape < 1.0) {
    // Boost to shape+1 and scale back.
    const double u = 1.0 - next_double();
    return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = next_double();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v / rate;
  }
}

long RngStream::poisson(double mean) {
  if (mean < 0.0) throw std::invalid_argument("poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    // Product of uniforms against exp(-mean).
    const double threshold = std::exp(-mean);
    long k = 0;
    double prod = next_double();
    while (prod > threshold) {
      ++k;
      prod *= next_double();
    }
    return k;
  }
  // PTRS (Hormann 1993): transformed rejection with squeeze.
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    double u = next_double() - 0.5;
    double v = next_double();
    double us = 0.5 - std::fabs(u);
    double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_mean - mean - std::lgamma(k + 1.0))
      return static_cast<long>(k);
  }
}

RngStream derive_stream(uint64_t base_seed, uint64_t replication,
                        std::string_view role) {
  uint64_t acc = mix64(base_seed ^ 0x9e3779b97f4a7c15ull);
  acc = mix64(acc ^ fnv1a(role));
  acc = mix64(acc ^ replication);
  return RngStream(acc);
}

}  // namespace sbos
