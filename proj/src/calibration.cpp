#include "seqparadox/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/beta.hpp>

#include "seqparadox/errors.hpp"
#include "seqparadox/parallel.hpp"
#include "seqparadox/stats_core.hpp"

namespace seqparadox {

namespace {

constexpr std::size_t kChunk = 8192;

double posterior_cdf(const UniverseConfig& cfg, PosteriorKind kind, const Replicate& rep) {
  const TrialSummary summary = summarize(rep.data);
  if (kind == PosteriorKind::conjugate) {
    const ConjugatePosterior post = conjugate_posterior(summary, cfg.theta_prior, cfg.design);
    return norm_cdf((rep.theta - post.mean) / post.sd);
  }
  const HierPosterior post =
      make_hier_posterior(summary, cfg.theta_prior, *cfg.design_prior, cfg.design);
  return hier_cdf(rep.theta, post);
}

// Running sums combined chunk by chunk in index order.
struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++count;
  }
  void merge(const Moments& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    count += o.count;
  }
  double mean() const {
    return count ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
  }
  double se() const {
    if (count < 2) return std::numeric_limits<double>::quiet_NaN();
    const double n = static_cast<double>(count);
    const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
    return std::sqrt(var / n);
  }
};

}  // namespace

void UniverseConfig::validate() const {
  design.validate();
  theta_prior.validate();
  if (theta_prior.flat) throw DomainError("universe: a flat prior cannot be sampled");
  if (design_prior) design_prior->validate();
  if (n_reps < 1) throw DomainError("universe: n_reps must be >= 1");
}

Replicate draw_replicate(const UniverseConfig& cfg, std::size_t index) {
  RngStream rng(cfg.master_seed, index);
  Replicate rep;
  rep.index = index;
  rep.theta = cfg.theta_prior.mu + cfg.theta_prior.tau * rng.normal();
  rep.psi = cfg.design.psi;
  if (cfg.design_prior) {
    const DesignPrior& dp = *cfg.design_prior;
    rep.psi = dp.a + dp.b * rep.theta + dp.omega * rng.normal();
  }
  DesignConfig design = cfg.design;
  design.psi = rep.psi;
  rep.data = simulate_trial(design, rep.theta, rng);
  return rep;
}

SbcResult run_sbc_detailed(const UniverseConfig& cfg, PosteriorKind kind,
                           std::optional<int> condition_on_x) {
  cfg.validate();
  if (kind == PosteriorKind::hierarchical && !cfg.design_prior) {
    throw DomainError("run_sbc: the hierarchical posterior needs a design prior");
  }
  if (condition_on_x && *condition_on_x != 0 && *condition_on_x != 1) {
    throw DomainError("run_sbc: condition_on_x must be 0 or 1");
  }

  SbcResult result;
  const std::size_t max_attempts =
      condition_on_x ? std::max<std::size_t>(1000 * cfg.n_reps, kChunk) : cfg.n_reps;

  while (result.replicates.size() < cfg.n_reps && result.attempted < max_attempts) {
    const std::size_t start = result.attempted;
    const std::size_t count = std::min(kChunk, max_attempts - start);
    std::vector<std::optional<Replicate>> chunk(count);
    parallel_for(count, cfg.workers, [&](std::size_t i) {
      Replicate rep = draw_replicate(cfg, start + i);
      if (condition_on_x && rep.data.x != *condition_on_x) return;
      rep.posterior_cdf_at_theta = posterior_cdf(cfg, kind, rep);
      chunk[i] = std::move(rep);
    });
    for (auto& rep : chunk) {
      if (rep && result.replicates.size() < cfg.n_reps) result.replicates.push_back(std::move(*rep));
    }
    result.attempted += count;
  }
  if (result.replicates.empty()) {
    throw EmptySelectionError("run_sbc: no replicate matched the conditioning event");
  }
  std::vector<double> pit;
  pit.reserve(result.replicates.size());
  for (const auto& rep : result.replicates) pit.push_back(rep.posterior_cdf_at_theta);
  result.report = uniformity_report(pit);
  return result;
}

UniformityReport run_sbc(const UniverseConfig& cfg, PosteriorKind kind,
                         std::optional<int> condition_on_x) {
  return run_sbc_detailed(cfg, kind, condition_on_x).report;
}

double expected_retention(const UniverseConfig& cfg) {
  cfg.validate();
  const double se = cfg.design.sigma / std::sqrt(static_cast<double>(cfg.design.n));
  if (cfg.design.investigator == Investigator::A) return 1.0;
  // X = 1 iff a + (b - 1) Theta + eps - se Z >= 0.
  const double a = cfg.design_prior ? cfg.design_prior->a : cfg.design.psi;
  const double b = cfg.design_prior ? cfg.design_prior->b : 0.0;
  const double omega = cfg.design_prior ? std::hypot(cfg.design_prior->omega, se) : se;
  return probit_normal_integral(a, b - 1.0, 0.0, omega, cfg.theta_prior.mu, cfg.theta_prior.tau,
                                1);
}

SelectionShift selection_shift_study(const UniverseConfig& cfg, std::size_t n_reps) {
  cfg.validate();
  if (n_reps < 1) throw DomainError("selection_shift_study: n_reps must be >= 1");
  const std::size_t chunks = (n_reps + kChunk - 1) / kChunk;
  std::vector<Moments> all(chunks), cont(chunks), stop(chunks);
  parallel_for(chunks, cfg.workers, [&](std::size_t c) {
    const std::size_t end = std::min(n_reps, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      const Replicate rep = draw_replicate(cfg, i);
      all[c].add(rep.theta);
      (rep.data.x == 1 ? cont[c] : stop[c]).add(rep.theta);
    }
  });
  Moments a, k, s;
  for (std::size_t c = 0; c < chunks; ++c) {
    a.merge(all[c]);
    k.merge(cont[c]);
    s.merge(stop[c]);
  }
  SelectionShift out;
  out.mean_theta_all = a.mean();
  out.se_all = a.se();
  out.mean_theta_continue = k.mean();
  out.se_continue = k.se();
  out.mean_theta_stop = s.mean();
  out.se_stop = s.se();
  out.n_continue = k.count;
  out.n_stop = s.count;
  out.continue_absent = k.count == 0;
  out.stop_absent = s.count == 0;
  return out;
}

SelectionShift selection_shift_closed_form(const UniverseConfig& cfg) {
  cfg.validate();
  const double mu = cfg.theta_prior.mu;
  const double tau = cfg.theta_prior.tau;
  SelectionShift out;
  out.mean_theta_all = mu;
  if (cfg.design.investigator == Investigator::A) {
    out.mean_theta_continue = mu;
    out.stop_absent = true;
    out.mean_theta_stop = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const double se = cfg.design.sigma / std::sqrt(static_cast<double>(cfg.design.n));
  const double a = cfg.design_prior ? cfg.design_prior->a : cfg.design.psi;
  const double coupling = (cfg.design_prior ? cfg.design_prior->b : 0.0) - 1.0;
  const double omega = cfg.design_prior ? cfg.design_prior->omega : 0.0;
  const double scale = std::sqrt(se * se + omega * omega + coupling * coupling * tau * tau);
  const double d = (a + coupling * mu) / scale;
  const double shift = coupling * tau * tau / scale;
  out.mean_theta_continue = mu + shift * inverse_mills(d);
  out.mean_theta_stop = mu - shift * inverse_mills(-d);
  return out;
}

BiasStudy bias_mc_study(double theta, const DesignConfig& design, std::size_t n_reps,
                        std::uint64_t seed, unsigned workers) {
  design.validate();
  if (n_reps < 10'000) throw DomainError("bias_mc_study: n_reps must be >= 10^4");
  BiasStudy out;
  out.n_reps = n_reps;
  if (design.investigator == Investigator::B) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const auto conditional = [&](int x) {
      try {
        return conditional_estimator_mean(theta, design, x);
      } catch (const DegenerateError&) {
        return nan;
      }
    };
    out.closed_form = BiasReport{theta,
                                 design.psi,
                                 marginal_estimator_mean(theta, design),
                                 conditional(0),
                                 conditional(1),
                                 continuation_prob(theta, design)};
  } else {
    out.closed_form = BiasReport{theta, design.psi, theta,
                                 std::numeric_limits<double>::quiet_NaN(), theta, 1.0};
  }

  const std::size_t chunks = (n_reps + kChunk - 1) / kChunk;
  std::vector<Moments> all(chunks), cont(chunks), stop(chunks), ind(chunks);
  parallel_for(chunks, workers, [&](std::size_t c) {
    const std::size_t end = std::min(n_reps, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      RngStream rng(seed, i);
      const TrialData data = simulate_trial(design, theta, rng);
      const double estimate = mle(summarize(data));
      all[c].add(estimate);
      ind[c].add(static_cast<double>(data.x));
      (data.x == 1 ? cont[c] : stop[c]).add(estimate);
    }
  });
  Moments a, k, s, x;
  for (std::size_t c = 0; c < chunks; ++c) {
    a.merge(all[c]);
    k.merge(cont[c]);
    s.merge(stop[c]);
    x.merge(ind[c]);
  }
  out.mc_marginal_mean = a.mean();
  out.se_marginal_mean = a.se();
  out.mc_cond_mean_continue = k.mean();
  out.se_cond_mean_continue = k.se();
  out.mc_cond_mean_stop = s.mean();
  out.se_cond_mean_stop = s.se();
  out.mc_continuation_prob = x.mean();
  out.se_continuation_prob = x.se();
  out.n_continue = k.count;
  out.n_stop = s.count;
  return out;
}

GreedyDemo greedy_miscalibration_demo(std::size_t n_total, double alpha, double beta,
                                      std::size_t n_reps, std::uint64_t seed, unsigned workers) {
  if (n_total < 1) throw DomainError("greedy demo: N must be >= 1");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw DomainError("greedy demo: Beta parameters must be > 0");
  if (n_reps < 1) throw DomainError("greedy demo: n_reps must be >= 1");

  std::vector<double> naive(n_reps), full(n_reps), retained_mean(n_reps), p_true(n_reps);
  parallel_for(n_reps, workers, [&](std::size_t i) {
    RngStream rng(seed, i);
    const double p = rng.beta(alpha, beta);
    const GreedyTrialData data = simulate_greedy(n_total, p, rng);
    const auto count = [](const std::vector<int>& v) {
      return static_cast<double>(std::count(v.begin(), v.end(), 1));
    };
    const double s_ret = count(data.retained);
    const double s_all = count(data.raw);
    const double n_ret = static_cast<double>(data.n0);
    const double n_all = static_cast<double>(n_total);
    naive[i] = boost::math::ibeta(alpha + s_ret, beta + n_ret - s_ret, p);
    full[i] = boost::math::ibeta(alpha + s_all, beta + n_all - s_all, p);
    retained_mean[i] = s_ret / n_ret;
    p_true[i] = p;
  });

  GreedyDemo out;
  out.n_reps = n_reps;
  out.naive = uniformity_report(naive);
  out.full = uniformity_report(full);
  Moments r, p, gap;
  for (std::size_t i = 0; i < n_reps; ++i) {
    r.add(retained_mean[i]);
    p.add(p_true[i]);
    gap.add(retained_mean[i] - p_true[i]);
  }
  out.mean_retained = r.mean();
  out.mean_p = p.mean();
  out.se_retained_minus_p = gap.se();
  return out;
}

DesignPrior empirical_bayes_design_prior(const TrialSummary& summary,
                                         const DesignConfig& design) {
  design.validate();
  const double b = empirical_bayes_b(summary);
  const double omega = b * design.sigma / std::sqrt(2.0 * design.n);
  return DesignPrior{b * design.psi, b, omega};
}

double eb_equivalence_gap(const TrialSummary& summary, const DesignConfig& design,
                          const DesignPrior& prior) {
  DesignConfig b_design = design;
  b_design.investigator = Investigator::B;
  const HierPosterior post =
      make_hier_posterior(summary, ThetaPrior::flat_prior(), prior, b_design);
  const double bayes = correction_term(post);
  const double freq = bias_corrected_estimate(summary, b_design) - mle(summary);
  return std::abs(bayes - freq);
}

double eb_equivalence_check(const TrialSummary& summary, const DesignConfig& design) {
  return eb_equivalence_gap(summary, design, empirical_bayes_design_prior(summary, design));
}

}  // namespace seqparadox
