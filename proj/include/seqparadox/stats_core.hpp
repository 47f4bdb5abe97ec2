#pragma once

#include <limits>

namespace seqparadox {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Standard normal density. Throws DomainError for non-finite z.
double norm_pdf(double z);

/// Standard normal distribution function, computed from erfc. Throws DomainError for non-finite z.
double norm_cdf(double z);

/// Inverse of norm_cdf for p in (0, 1).
double norm_quantile(double p);

// Log-space helpers. These accept +-inf and never throw.
double log_norm_pdf(double z);
double log_norm_cdf(double z);

/// phi(z) / Phi(z), stable for all z (tends to -z as z -> -inf, to 0 as z -> +inf).
double inverse_mills(double z);

/// Mean of N(mu, sigma^2) truncated to [lo, hi]. Bounds may be infinite.
/// Throws DegenerateError when the retained mass is below 1e-300.
double truncated_normal_mean(double mu, double sigma, double lo, double hi);

/// E[Phi(sign * (a + b U - c) / omega)] for U ~ N(mu, sigma^2).
///
/// Closed form Phi(sign * (a + b mu - c) / sqrt(omega^2 + sigma^2 b^2)).
/// sign must be +1 or -1; omega > 0; sigma >= 0.
double probit_normal_integral(double a, double b, double c, double omega, double mu,
                              double sigma, int sign);

/// Logarithm of probit_normal_integral, usable when the value underflows.
double log_probit_normal_integral(double a, double b, double c, double omega, double mu,
                                  double sigma, int sign);

}  // namespace seqparadox
