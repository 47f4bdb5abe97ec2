#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace seqparadox {

inline constexpr std::size_t kHistogramBins = 20;

struct UniformityReport {
  std::size_t n_used = 0;
  double ks_statistic = 0.0;
  double ks_p_value = 1.0;
  std::array<std::size_t, kHistogramBins> histogram{};
};

/// P(D_n < d) for the one-sample Kolmogorov-Smirnov statistic
/// (Marsaglia, Tsang and Wang 2003).
double kolmogorov_cdf(std::size_t n, double d);

/// Limiting Kolmogorov survival function Q(lambda) = 2 sum (-1)^(j-1) exp(-2 j^2 lambda^2).
double kolmogorov_survival(double lambda);

/// KS test of values against Uniform(0, 1) plus a 20-bin histogram.
UniformityReport uniformity_report(std::span<const double> values);

struct TwoSampleKs {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample KS test with the asymptotic p-value (Stephens' small-sample correction).
TwoSampleKs two_sample_ks(std::span<const double> a, std::span<const double> b);

}  // namespace seqparadox
