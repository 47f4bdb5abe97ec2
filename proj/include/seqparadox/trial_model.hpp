#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "seqparadox/rng.hpp"

namespace seqparadox {

enum class Investigator { A, B };

std::string_view to_string(Investigator who);
/// Parses "A"/"B" (case-insensitive). Throws DomainError otherwise.
Investigator parse_investigator(std::string_view text);

/// Fixed design knobs of the one-interim trial.
///
/// Investigator A always collects both stages. Investigator B stops after the
/// first n outcomes when their mean exceeds psi; a tie continues.
struct DesignConfig {
  int n = 1;
  double sigma = 1.0;
  double psi = 0.0;
  Investigator investigator = Investigator::B;

  void validate() const;
  /// True when a first-stage mean of ybar1 leads to the second stage.
  bool continues(double ybar1) const;
};

struct TrialData {
  std::vector<double> y1;
  std::optional<std::vector<double>> y2;  // present iff x == 1
  int x = 0;

  void validate() const;
};

struct TrialSummary {
  double ybar1 = 0.0;
  double ybar = 0.0;  // pooled over the (1 + x) n observed outcomes
  int x = 0;
};

TrialData simulate_trial(const DesignConfig& design, double theta, RngStream& rng);

TrialSummary summarize(const TrialData& data);

/// Gaussian log-likelihood of the observed outcomes at theta.
///
/// With include_design_factor, adds log P(X = x | first stage) under the design,
/// which is 0 for consistent data. Data the design could not have produced
/// throws InconsistencyError.
double log_likelihood(const TrialData& data, double theta, const DesignConfig& design,
                      bool include_design_factor);

/// max over the grid of |d(theta) - d(grid[0])| where d = L_B - L_A in log scale,
/// both likelihoods including their design factors. Zero certifies that the two
/// likelihoods are proportional in theta.
double check_likelihood_proportionality(const TrialData& data, const DesignConfig& design_a,
                                        const DesignConfig& design_b,
                                        std::span<const double> theta_grid);

/// Binary-outcome study that keeps only the prefix with the largest running mean.
struct GreedyTrialData {
  std::vector<int> raw;
  std::size_t n0 = 1;  // 1-based length of the retained prefix
  std::vector<int> retained;

  std::size_t n_total() const { return raw.size(); }
};

/// Builds the greedy record from raw outcomes; argmax ties go to the smallest index.
GreedyTrialData greedy_from_raw(std::vector<int> raw);

GreedyTrialData simulate_greedy(std::size_t n_total, double p, RngStream& rng);

enum class GreedyLikelihood {
  naive_prefix,  // retained prefix treated as a fixed-size Bernoulli sample
  full,          // all N raw outcomes
};

double greedy_log_likelihood(const GreedyTrialData& data, double p, GreedyLikelihood kind);

/// Same statistic as check_likelihood_proportionality for the naive-prefix vs
/// full-data likelihoods of a greedy study over a grid of p in (0, 1).
double check_greedy_proportionality(const GreedyTrialData& data, std::span<const double> p_grid);

}  // namespace seqparadox
