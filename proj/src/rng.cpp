#include "seqparadox/rng.hpp"

#include <cmath>

#include "seqparadox/errors.hpp"
#include "seqparadox/stats_core.hpp"

namespace seqparadox {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 / Stafford variant 13 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : master_seed_(master_seed), stream_index_(stream_index) {
  const std::uint64_t seed_hash = mix64(master_seed + kGolden);
  key_ = mix64(seed_hash ^ mix64(stream_index * kGolden + 0xD1B54A32D192ED03ULL));
  increment_ = mix64(key_ ^ 0x2545F4914F6CDD1DULL) | 1ULL;
}

RngStream::result_type RngStream::operator()() {
  ++counter_;
  return mix64(key_ + counter_ * increment_);
}

double RngStream::uniform() {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return norm_quantile(uniform()); }

bool RngStream::bernoulli(double p) { return uniform() < p; }

double RngStream::gamma(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw DomainError("RngStream::gamma: shape must be positive");
  }
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a + 1) * U^(1/a)
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double z;
    double v;
    do {
      z = normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) return d * v;
  }
}

double RngStream::beta(double alpha, double beta) {
  const double x = gamma(alpha);
  const double y = gamma(beta);
  return x / (x + y);
}

}  // namespace seqparadox
