#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seqparadox/rng.hpp"
#include "seqparadox/trial_model.hpp"

namespace seqparadox {

/// Theta ~ N(mu, tau^2), or the improper flat prior (tau -> infinity) when flat is set.
struct ThetaPrior {
  double mu = 0.0;
  double tau = 1.0;
  bool flat = false;

  static ThetaPrior flat_prior() { return ThetaPrior{0.0, 1.0, true}; }
  void validate() const;
};

/// Psi = a + b * Theta + eps, eps ~ N(0, omega^2).
struct DesignPrior {
  double a = 0.0;
  double b = 0.0;
  double omega = 1.0;

  void validate() const;
};

/// Normal posterior N(mean, sd^2) of Theta from the observed outcomes alone.
struct ConjugatePosterior {
  double mean = 0.0;
  double sd = 1.0;
};

ConjugatePosterior conjugate_posterior(const TrialSummary& summary, const ThetaPrior& prior,
                                       const DesignConfig& design);

/// Posterior of Theta after integrating the threshold Psi out of the design prior.
///
/// For investigator B the density is
///   Phi(s (a + b theta - ybar1) / omega) * phi((theta - m) / v) / v / normalizer,
/// with (m, v) the conjugate mean and sd and s = +1 for a continued trial,
/// -1 for a stopped one. Investigator A has no design factor and the density is
/// the conjugate one. Immutable once built; share freely.
struct HierPosterior {
  ConjugatePosterior conjugate;
  DesignPrior design_prior;
  double ybar1 = 0.0;
  int x = 1;
  Investigator investigator = Investigator::B;
  double normalizer = 1.0;
  double log_normalizer = 0.0;

  bool has_design_factor() const { return investigator == Investigator::B; }
  int sign() const { return x == 1 ? 1 : -1; }
  /// sqrt(omega^2 + sd^2 b^2)
  double combined_scale() const;
  /// (a + b m - ybar1) / combined_scale()
  double standardized_offset() const;
};

HierPosterior make_hier_posterior(const TrialSummary& summary, const ThetaPrior& theta_prior,
                                  const DesignPrior& design_prior, const DesignConfig& design);

double hier_log_density(double theta, const HierPosterior& post);
double hier_density(double theta, const HierPosterior& post);

/// Closed-form posterior mean: conjugate mean plus correction_term.
/// Throws DegenerateError when the normalizer underflows below 1e-300.
double hier_posterior_mean(const HierPosterior& post);

/// s b v^2 / sqrt(omega^2 + v^2 b^2) * phi(d) / Phi(s d); zero without a design factor.
double correction_term(const HierPosterior& post);

/// Closed-form posterior standard deviation (truncated-bivariate-normal variance).
double hier_posterior_sd(const HierPosterior& post);

/// Moment generating function E[exp(t Theta)].
double hier_posterior_mgf(double t, const HierPosterior& post);

/// argmax of the density by golden-section search refined with three-point
/// parabolic steps; accurate to about 1e-8. Throws AccuracyError on failure.
double hier_posterior_mode(const HierPosterior& post);

/// Interval that holds all but a negligible (< 1e-20) share of the posterior mass.
std::pair<double, double> hier_support(const HierPosterior& post);

/// Distribution function by adaptive quadrature of the density.
double hier_cdf(double theta, const HierPosterior& post, double tol = 1e-12);

/// Inverse of hier_cdf by safeguarded Newton iteration. p in (0, 1).
double hier_quantile(double p, const HierPosterior& post);

/// Tabulated distribution function for repeated quantile evaluation.
///
/// The support is cut into panels whose masses are integrated once; a quantile
/// then costs a panel lookup plus a few Newton steps inside one panel.
class HierCdfTable {
 public:
  explicit HierCdfTable(HierPosterior post, std::size_t panels = 512);

  double cdf(double theta) const;
  double quantile(double p) const;
  const HierPosterior& posterior() const { return post_; }

 private:
  double partial(std::size_t panel, double theta) const;

  HierPosterior post_;
  std::vector<double> nodes_;
  std::vector<double> cumulative_;  // cumulative_[k] = cdf(nodes_[k]) (unnormalized by total)
};

/// m independent draws by inversion of the tabulated distribution function.
std::vector<double> sample_grid(const HierPosterior& post, std::size_t m, RngStream& rng);

struct McmcResult {
  std::vector<double> draws;  // post burn-in
  double acceptance_rate = 0.0;
  bool tuning_warning = false;  // acceptance outside [0.1, 0.9]
};

/// Proposal sd used when the caller passes a non-positive step: 2.4 conjugate sds.
double default_mcmc_step(const HierPosterior& post);
inline constexpr std::size_t kDefaultBurnIn = 1000;
inline constexpr std::size_t kDefaultThinning = 10;

/// Random-walk Metropolis chain on hier_log_density started at the conjugate mean.
McmcResult sample_mcmc(const HierPosterior& post, std::size_t m, std::size_t burn_in, double step,
                       RngStream& rng);

/// Every k-th element, starting with the first.
std::vector<double> thin(std::span<const double> draws, std::size_t every);

/// b = ybar1 / (2 ybar). Needs a continued trial with ybar1 and ybar of the same sign.
double empirical_bayes_b(const TrialSummary& summary);

/// One-dimensional posterior summary as reported on the command line.
struct PosteriorSummary {
  double mean = 0.0;
  double mode = 0.0;
  double sd = 0.0;
  double normalizer = 1.0;
  std::map<double, double> quantiles;
  std::string method;  // closed_form | quadrature | mcmc | grid
};

/// Closed-form mean/sd, optimizer mode, quantiles by root-finding.
PosteriorSummary summarize_closed_form(const HierPosterior& post, std::span<const double> probs);

/// Mean/sd by quadrature of the density, same mode and quantiles.
PosteriorSummary summarize_quadrature(const HierPosterior& post, std::span<const double> probs);

/// Moments, empirical quantiles and kernel-density mode of a sample.
PosteriorSummary summarize_draws(std::span<const double> draws, double normalizer,
                                 std::span<const double> probs, std::string method);

/// Mode of a Gaussian kernel density estimate (Silverman bandwidth, 512-point grid).
double kde_mode(std::span<const double> draws);

}  // namespace seqparadox
