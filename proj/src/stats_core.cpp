#include "seqparadox/stats_core.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "seqparadox/errors.hpp"

namespace seqparadox {

namespace {

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;  // 1/sqrt(2 pi)
constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;  // log(sqrt(2 pi))
constexpr double kSqrt2Pi = 2.50662827463100050241576528481;
constexpr double kDegenerateMass = 1e-300;

void require_finite(double z, const char* what) {
  if (!std::isfinite(z)) throw DomainError(std::string(what) + ": non-finite argument");
}

// Phi for any z including +-inf.
double cdf_unchecked(double z) {
  if (z == kInf) return 1.0;
  if (z == -kInf) return 0.0;
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double pdf_unchecked(double z) {
  if (!std::isfinite(z)) return 0.0;
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

// Acklam's rational approximation (relative error ~1.2e-9) for p <= 0.5.
double quantile_lower_initial(double p) {
  static constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                              -2.759285104469687e+02, 1.383577518672690e+02,
                                              -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                              -1.556989798598866e+02, 6.680131188771972e+01,
                                              -1.328068155288572e+01};
  static constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                              -2.400758277161838e+00, -2.549732539343734e+00,
                                              4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double norm_pdf(double z) {
  require_finite(z, "norm_pdf");
  return pdf_unchecked(z);
}

double norm_cdf(double z) {
  require_finite(z, "norm_cdf");
  const double v = cdf_unchecked(z);
  return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("norm_quantile: p must lie in (0, 1)");
  if (p > 0.5) return -norm_quantile(1.0 - p);

  double x = quantile_lower_initial(p);
  // Halley refinement against the erfc-based cdf.
  for (int i = 0; i < 2; ++i) {
    const double e = cdf_unchecked(x) - p;
    const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double log_norm_pdf(double z) {
  if (!std::isfinite(z)) return -kInf;
  return -0.5 * z * z - kLogSqrt2Pi;
}

double log_norm_cdf(double z) {
  if (std::isnan(z)) return z;
  if (z == kInf) return 0.0;
  if (z == -kInf) return -kInf;
  if (z > 0.0) return std::log1p(-cdf_unchecked(-z));
  if (z > -35.0) return std::log(cdf_unchecked(z));
  // Asymptotic series: Phi(z) ~ phi(z)/(-z) * (1 - 1/z^2 + 3/z^4 - 15/z^6 + 105/z^8).
  const double r = 1.0 / (z * z);
  const double series = 1.0 - r * (1.0 - r * (3.0 - r * (15.0 - r * 105.0)));
  return log_norm_pdf(z) - std::log(-z) + std::log(series);
}

double inverse_mills(double z) {
  if (z == kInf) return 0.0;
  return std::exp(log_norm_pdf(z) - log_norm_cdf(z));
}

double truncated_normal_mean(double mu, double sigma, double lo, double hi) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("truncated_normal_mean: sigma must be positive and finite");
  }
  if (!std::isfinite(mu) || std::isnan(lo) || std::isnan(hi)) {
    throw DomainError("truncated_normal_mean: non-finite location or NaN bound");
  }
  if (!(lo < hi)) throw DomainError("truncated_normal_mean: requires lo < hi");

  const double alpha = (lo - mu) / sigma;
  const double beta = (hi - mu) / sigma;

  // One-sided truncations go through the stable Mills ratio.
  if (beta == kInf) {
    if (alpha == -kInf) return mu;
    if (cdf_unchecked(-alpha) < kDegenerateMass) {
      throw DegenerateError("truncated_normal_mean: retained mass underflows");
    }
    return mu + sigma * inverse_mills(-alpha);
  }
  if (alpha == -kInf) {
    if (cdf_unchecked(beta) < kDegenerateMass) {
      throw DegenerateError("truncated_normal_mean: retained mass underflows");
    }
    return mu - sigma * inverse_mills(beta);
  }

  // Two-sided: take the mass difference on the side where it is not a difference of ~1's.
  const double mass = alpha > 0.0 ? cdf_unchecked(-alpha) - cdf_unchecked(-beta)
                                  : cdf_unchecked(beta) - cdf_unchecked(alpha);
  if (!(mass >= kDegenerateMass)) {
    throw DegenerateError("truncated_normal_mean: retained mass underflows");
  }
  return mu + sigma * (pdf_unchecked(alpha) - pdf_unchecked(beta)) / mass;
}

namespace {

double probit_normal_argument(double a, double b, double c, double omega, double mu,
                              double sigma, int sign) {
  if (!(omega > 0.0)) throw DomainError("probit_normal_integral: omega must be positive");
  if (!(sigma >= 0.0)) throw DomainError("probit_normal_integral: sigma must be non-negative");
  if (sign != 1 && sign != -1) throw DomainError("probit_normal_integral: sign must be +-1");
  for (double v : {a, b, c, omega, mu, sigma}) require_finite(v, "probit_normal_integral");
  return sign * (a + b * mu - c) / std::hypot(omega, sigma * b);
}

}  // namespace

double probit_normal_integral(double a, double b, double c, double omega, double mu,
                              double sigma, int sign) {
  return cdf_unchecked(probit_normal_argument(a, b, c, omega, mu, sigma, sign));
}

double log_probit_normal_integral(double a, double b, double c, double omega, double mu,
                                  double sigma, int sign) {
  return log_norm_cdf(probit_normal_argument(a, b, c, omega, mu, sigma, sign));
}

}  // namespace seqparadox
