#pragma once

#include <cstddef>
#include <functional>

namespace seqparadox {

inline constexpr double kDefaultQuadratureTol = 1e-10;
inline constexpr std::size_t kDefaultEvaluationBudget = 1'000'000;

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
};

/// Globally adaptive 15-point Gauss-Kronrod integration of f over [lo, hi].
///
/// Subdivides the interval with the largest error estimate until the summed
/// estimate drops below tol. Throws AccuracyError (carrying the best value)
/// when the evaluation budget runs out first, and DomainError when f returns
/// a non-finite value or the bounds are invalid.
QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           double tol = kDefaultQuadratureTol,
                           std::size_t max_evaluations = kDefaultEvaluationBudget);

}  // namespace seqparadox
