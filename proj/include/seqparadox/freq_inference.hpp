#pragma once

#include "seqparadox/trial_model.hpp"

namespace seqparadox {

/// Closed-form sampling expectations of the pooled-mean estimator at (theta, psi).
struct BiasReport {
  double theta = 0.0;
  double psi = 0.0;
  double marginal_mean = 0.0;
  double cond_mean_stop = 0.0;      // E[estimate | x = 0]
  double cond_mean_continue = 0.0;  // E[estimate | x = 1]
  double continuation_prob = 0.0;
};

/// Maximum likelihood estimate: the mean of all observed outcomes.
double mle(const TrialSummary& summary);

/// P(X = 1 | theta) = Phi(sqrt(n)/sigma (psi - theta)) for investigator B; 1 for A.
double continuation_prob(double theta, const DesignConfig& design);

/// E[mle] = theta + sigma/(2 sqrt(n)) phi(sqrt(n)/sigma (psi - theta)).
double marginal_estimator_mean(double theta, const DesignConfig& design);

/// E[mle | X = x]. Throws DegenerateError when P(X = x) < 1e-300.
double conditional_estimator_mean(double theta, const DesignConfig& design, int x);

/// All of the above in one report, for investigator B's rule.
BiasReport bias_report(double theta, const DesignConfig& design);

/// mle plus the plug-in continuation bias sigma/(2 sqrt(n)) phi(z)/Phi(z), z = sqrt(n)/sigma (psi - mle).
/// Defined for continued trials only; x = 0 throws UnsupportedError.
double bias_corrected_estimate(const TrialSummary& summary, const DesignConfig& design);

}  // namespace seqparadox
