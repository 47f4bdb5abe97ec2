#pragma once

#include <cstdint>
#include <limits>

namespace seqparadox {

/// Counter-based random stream.
///
/// The pair (master_seed, stream_index) is hashed into a key and an odd
/// increment; the k-th output is a 64-bit finalizer applied to key + k * increment.
/// Nothing depends on thread scheduling, so replicate i of a study always sees
/// the same numbers. A stream is single-owner; give each worker its own index.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal by inversion.
  double normal();
  bool bernoulli(double p);
  /// Gamma(shape, 1), Marsaglia-Tsang.
  double gamma(double shape);
  double beta(double alpha, double beta);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::uint64_t key_;
  std::uint64_t increment_;
  std::uint64_t counter_ = 0;
};

}  // namespace seqparadox
