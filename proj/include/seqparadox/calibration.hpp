#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "seqparadox/bayes_inference.hpp"
#include "seqparadox/freq_inference.hpp"
#include "seqparadox/trial_model.hpp"
#include "seqparadox/uniformity.hpp"

namespace seqparadox {

/// The universe of relevant trials: parameters drawn from the prior, then data
/// from the sampling model. Without a design prior every trial uses design.psi.
struct UniverseConfig {
  ThetaPrior theta_prior;
  std::optional<DesignPrior> design_prior;
  DesignConfig design;
  std::size_t n_reps = 2000;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;

  void validate() const;
};

/// One draw of the universe, and the analysed posterior's CDF at the true theta.
struct Replicate {
  std::size_t index = 0;  // RNG stream index
  double theta = 0.0;
  double psi = 0.0;
  TrialData data;
  double posterior_cdf_at_theta = 0.0;
};

enum class PosteriorKind { conjugate, hierarchical };

struct SbcResult {
  UniformityReport report;
  std::vector<Replicate> replicates;  // retained, in stream order
  std::size_t attempted = 0;
};

/// Draws (theta, psi) for replicate `index` and simulates its trial.
Replicate draw_replicate(const UniverseConfig& cfg, std::size_t index);

/// Simulation-based calibration. With condition_on_x, replicates whose x differs
/// are discarded and sampling continues until cfg.n_reps are retained (or an
/// attempt cap of 1000 n_reps is hit). Throws EmptySelectionError when nothing
/// is retained.
SbcResult run_sbc_detailed(const UniverseConfig& cfg, PosteriorKind kind,
                           std::optional<int> condition_on_x);

UniformityReport run_sbc(const UniverseConfig& cfg, PosteriorKind kind,
                         std::optional<int> condition_on_x);

/// P(X = 1) under the joint prior, Phi((a + (b - 1) mu) / sqrt(sigma^2/n + omega^2 + (b - 1)^2 tau^2))
/// (fixed psi: a = psi, b = 0, omega = 0).
double expected_retention(const UniverseConfig& cfg);

struct SelectionShift {
  double mean_theta_all = 0.0;
  double mean_theta_continue = 0.0;
  double mean_theta_stop = 0.0;
  double se_all = 0.0;
  double se_continue = 0.0;
  double se_stop = 0.0;
  std::size_t n_continue = 0;
  std::size_t n_stop = 0;
  bool continue_absent = false;
  bool stop_absent = false;
};

/// Empirical mean of theta overall and within each continuation stratum.
SelectionShift selection_shift_study(const UniverseConfig& cfg, std::size_t n_reps);

/// Exact E[theta | X = x] under the joint prior (same Mills-ratio form as the
/// hierarchical posterior mean, with coupling b - 1).
SelectionShift selection_shift_closed_form(const UniverseConfig& cfg);

/// Closed-form sampling expectations next to Monte Carlo estimates.
struct BiasStudy {
  BiasReport closed_form;
  double mc_marginal_mean = 0.0;
  double mc_cond_mean_stop = 0.0;
  double mc_cond_mean_continue = 0.0;
  double mc_continuation_prob = 0.0;
  double se_marginal_mean = 0.0;
  double se_cond_mean_stop = 0.0;
  double se_cond_mean_continue = 0.0;
  double se_continuation_prob = 0.0;
  std::size_t n_reps = 0;
  std::size_t n_stop = 0;
  std::size_t n_continue = 0;
};

/// Requires n_reps >= 10^4. For investigator A the stop column is NaN, as is any
/// conditional column whose conditioning event has negligible probability.
BiasStudy bias_mc_study(double theta, const DesignConfig& design, std::size_t n_reps,
                        std::uint64_t seed, unsigned workers = 1);

struct GreedyDemo {
  UniformityReport naive;  // Beta posterior from the retained prefix only
  UniformityReport full;   // Beta posterior from all N outcomes
  double mean_retained = 0.0;
  double mean_p = 0.0;
  double se_retained_minus_p = 0.0;
  std::size_t n_reps = 0;
};

/// p ~ Beta(alpha, beta); greedy study of size N; SBC of both posteriors.
GreedyDemo greedy_miscalibration_demo(std::size_t n_total, double alpha, double beta,
                                      std::size_t n_reps, std::uint64_t seed,
                                      unsigned workers = 1);

/// Design prior that turns the flat-prior Bayesian correction into the frequentist one:
/// b = ybar1 / (2 ybar), omega = b sigma / sqrt(2 n), a = b psi.
DesignPrior empirical_bayes_design_prior(const TrialSummary& summary, const DesignConfig& design);

/// |correction_term(flat prior, prior) - (bias_corrected_estimate - mle)|.
double eb_equivalence_gap(const TrialSummary& summary, const DesignConfig& design,
                          const DesignPrior& prior);

/// eb_equivalence_gap at the empirical-Bayes hyperparameters.
double eb_equivalence_check(const TrialSummary& summary, const DesignConfig& design);

}  // namespace seqparadox
