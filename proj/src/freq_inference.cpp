#include "seqparadox/freq_inference.hpp"

#include <cmath>

#include "seqparadox/errors.hpp"
#include "seqparadox/stats_core.hpp"

namespace seqparadox {

namespace {

constexpr double kDegenerateMass = 1e-300;

double standardized_gap(double theta, const DesignConfig& design) {
  return std::sqrt(static_cast<double>(design.n)) / design.sigma * (design.psi - theta);
}

}  // namespace

double mle(const TrialSummary& summary) { return summary.ybar; }

double continuation_prob(double theta, const DesignConfig& design) {
  design.validate();
  if (design.investigator == Investigator::A) return 1.0;
  const double z = standardized_gap(theta, design);
  if (z == kInf) return 1.0;
  if (z == -kInf) return 0.0;
  return norm_cdf(z);
}

double marginal_estimator_mean(double theta, const DesignConfig& design) {
  design.validate();
  if (design.investigator == Investigator::A) return theta;
  const double z = standardized_gap(theta, design);
  const double half_se = design.sigma / (2.0 * std::sqrt(static_cast<double>(design.n)));
  return theta + half_se * std::exp(log_norm_pdf(z));
}

double conditional_estimator_mean(double theta, const DesignConfig& design, int x) {
  design.validate();
  if (x != 0 && x != 1) throw DomainError("conditional_estimator_mean: x must be 0 or 1");
  if (design.investigator == Investigator::A) {
    if (x == 0) throw DegenerateError("conditional_estimator_mean: investigator A never stops");
    return theta;
  }
  const double z = standardized_gap(theta, design);
  const double se = design.sigma / std::sqrt(static_cast<double>(design.n));
  // Conditioning mass Phi(-z) for stopping, Phi(z) for continuing.
  const double signed_z = x == 0 ? -z : z;
  if (log_norm_cdf(signed_z) < std::log(kDegenerateMass)) {
    throw DegenerateError("conditional_estimator_mean: conditioning probability underflows");
  }
  // phi is even, so phi(z)/Phi(+-z) is the inverse Mills ratio at +-z.
  const double ratio = inverse_mills(signed_z);
  return x == 0 ? theta + se * ratio : theta - 0.5 * se * ratio;
}

BiasReport bias_report(double theta, const DesignConfig& design) {
  DesignConfig b = design;
  b.investigator = Investigator::B;
  BiasReport r;
  r.theta = theta;
  r.psi = b.psi;
  r.marginal_mean = marginal_estimator_mean(theta, b);
  r.cond_mean_stop = conditional_estimator_mean(theta, b, 0);
  r.cond_mean_continue = conditional_estimator_mean(theta, b, 1);
  r.continuation_prob = continuation_prob(theta, b);
  return r;
}

double bias_corrected_estimate(const TrialSummary& summary, const DesignConfig& design) {
  design.validate();
  if (summary.x != 1) {
    throw UnsupportedError("bias_corrected_estimate: only defined for continued trials (x = 1)");
  }
  const double estimate = mle(summary);
  const double z = standardized_gap(estimate, design);
  const double half_se = design.sigma / (2.0 * std::sqrt(static_cast<double>(design.n)));
  return estimate + half_se * inverse_mills(z);
}

}  // namespace seqparadox
