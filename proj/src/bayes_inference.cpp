#include "seqparadox/bayes_inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seqparadox/errors.hpp"
#include "seqparadox/quadrature.hpp"
#include "seqparadox/stats_core.hpp"

namespace seqparadox {

namespace {

constexpr double kDegenerateMass = 1e-300;
constexpr double kSupportWidthSds = 10.0;

double observed_count(const TrialSummary& summary, const DesignConfig& design) {
  return static_cast<double>((1 + summary.x) * design.n);
}

// Conditional mean and its Mills-ratio ingredient, without the degeneracy check.
double raw_correction(const HierPosterior& post) {
  if (!post.has_design_factor() || post.design_prior.b == 0.0) return 0.0;
  const double v = post.conjugate.sd;
  const double s = post.sign();
  return s * post.design_prior.b * v * v / post.combined_scale() *
         inverse_mills(s * post.standardized_offset());
}

void require_nondegenerate(const HierPosterior& post, const char* what) {
  if (post.has_design_factor() && post.log_normalizer < std::log(kDegenerateMass)) {
    throw DegenerateError(std::string(what) + ": posterior normalizer underflows");
  }
}

}  // namespace

void ThetaPrior::validate() const {
  if (flat) return;
  if (!std::isfinite(mu)) throw DomainError("theta prior: mu must be finite");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("theta prior: tau must be > 0");
}

void DesignPrior::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("design prior: a, b must be finite");
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw DomainError("design prior: omega must be > 0");
  }
}

ConjugatePosterior conjugate_posterior(const TrialSummary& summary, const ThetaPrior& prior,
                                       const DesignConfig& design) {
  prior.validate();
  design.validate();
  const double se2 = design.sigma * design.sigma / observed_count(summary, design);
  if (prior.flat) return ConjugatePosterior{summary.ybar, std::sqrt(se2)};
  const double tau2 = prior.tau * prior.tau;
  const double denom = tau2 + se2;
  return ConjugatePosterior{summary.ybar * tau2 / denom + prior.mu * se2 / denom,
                            std::sqrt(se2 * tau2 / denom)};
}

double HierPosterior::combined_scale() const {
  return std::hypot(design_prior.omega, conjugate.sd * design_prior.b);
}

double HierPosterior::standardized_offset() const {
  return (design_prior.a + design_prior.b * conjugate.mean - ybar1) / combined_scale();
}

HierPosterior make_hier_posterior(const TrialSummary& summary, const ThetaPrior& theta_prior,
                                  const DesignPrior& design_prior, const DesignConfig& design) {
  design_prior.validate();
  if (summary.x != 0 && summary.x != 1) throw DomainError("posterior: x must be 0 or 1");
  if (design.investigator == Investigator::A && summary.x != 1) {
    throw InconsistencyError("posterior: investigator A always continues");
  }
  HierPosterior post;
  post.conjugate = conjugate_posterior(summary, theta_prior, design);
  post.design_prior = design_prior;
  post.ybar1 = summary.ybar1;
  post.x = summary.x;
  post.investigator = design.investigator;
  if (post.has_design_factor()) {
    post.log_normalizer = log_probit_normal_integral(
        design_prior.a, design_prior.b, summary.ybar1, design_prior.omega, post.conjugate.mean,
        post.conjugate.sd, post.sign());
    post.normalizer = std::exp(post.log_normalizer);
  }
  return post;
}

double hier_log_density(double theta, const HierPosterior& post) {
  const double v = post.conjugate.sd;
  double lp = log_norm_pdf((theta - post.conjugate.mean) / v) - std::log(v);
  if (post.has_design_factor()) {
    const auto& dp = post.design_prior;
    lp += log_norm_cdf(post.sign() * (dp.a + dp.b * theta - post.ybar1) / dp.omega) -
          post.log_normalizer;
  }
  return lp;
}

double hier_density(double theta, const HierPosterior& post) {
  return std::exp(hier_log_density(theta, post));
}

double correction_term(const HierPosterior& post) {
  require_nondegenerate(post, "correction_term");
  return raw_correction(post);
}

double hier_posterior_mean(const HierPosterior& post) {
  return post.conjugate.mean + correction_term(post);
}

double hier_posterior_sd(const HierPosterior& post) {
  require_nondegenerate(post, "hier_posterior_sd");
  const double v = post.conjugate.sd;
  if (!post.has_design_factor() || post.design_prior.b == 0.0) return v;
  const double sd_offset = post.sign() * post.standardized_offset();
  const double lambda = inverse_mills(sd_offset);
  const double rho2 = std::pow(post.design_prior.b * v / post.combined_scale(), 2);
  const double var = v * v * (1.0 - rho2 * lambda * (lambda + sd_offset));
  return std::sqrt(std::max(var, 0.0));
}

double hier_posterior_mgf(double t, const HierPosterior& post) {
  if (!std::isfinite(t)) throw DomainError("hier_posterior_mgf: t must be finite");
  const double m = post.conjugate.mean;
  const double v2 = post.conjugate.sd * post.conjugate.sd;
  double log_m = 0.5 * t * t * v2 + m * t;
  if (post.has_design_factor()) {
    const auto& dp = post.design_prior;
    log_m += log_norm_cdf(post.sign() * (dp.a + dp.b * (m + t * v2) - post.ybar1) /
                          post.combined_scale()) -
             post.log_normalizer;
  }
  return std::exp(log_m);
}

std::pair<double, double> hier_support(const HierPosterior& post) {
  const double m = post.conjugate.mean;
  const double center = m + raw_correction(post);
  const double half = kSupportWidthSds * post.conjugate.sd;
  return {std::min(m, center) - half, std::max(m, center) + half};
}

double hier_posterior_mode(const HierPosterior& post) {
  if (!post.has_design_factor() || post.design_prior.b == 0.0) return post.conjugate.mean;

  auto f = [&](double theta) { return -hier_log_density(theta, post); };
  auto [lo, hi] = hier_support(post);

  // The density is log-concave, so golden-section search cannot be trapped.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  const double bracket_tol = 1e-6 * post.conjugate.sd;
  for (int it = 0; it < 500 && hi - lo > bracket_tol; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  double x = 0.5 * (lo + hi);

  // Parabola through three symmetric points; the vertex is the next iterate.
  double h = 1e-3 * post.conjugate.sd;
  for (int it = 0; it < 4; ++it, h *= 0.1) {
    const double fm = f(x - h);
    const double f0 = f(x);
    const double fp = f(x + h);
    const double curvature = fp - 2.0 * f0 + fm;
    if (!(curvature > 0.0)) break;
    const double step = 0.5 * h * (fm - fp) / curvature;
    if (std::abs(step) > 2.0 * h) {
      throw AccuracyError("hier_posterior_mode: refinement left the bracket", x);
    }
    x += step;
  }
  if (!std::isfinite(x)) throw AccuracyError("hier_posterior_mode: non-finite mode", x);
  return x;
}

double hier_cdf(double theta, const HierPosterior& post, double tol) {
  if (std::isnan(theta)) throw DomainError("hier_cdf: theta is NaN");
  const auto [lo, hi] = hier_support(post);
  if (theta <= lo) return 0.0;
  if (theta >= hi) return 1.0;
  auto density = [&](double t) { return hier_density(t, post); };
  const double center = post.conjugate.mean + raw_correction(post);
  double value;
  if (theta <= center) {
    value = integrate(density, lo, theta, tol).value;
  } else {
    value = 1.0 - integrate(density, theta, hi, tol).value;
  }
  return std::clamp(value, 0.0, 1.0);
}

namespace {

// Safeguarded Newton on g(theta) = F(theta) - target within [lo, hi], F' = density.
template <class G, class Dens>
double newton_bracketed(G&& g, Dens&& dens, double lo, double hi, double start, double tol) {
  double x = std::clamp(start, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double gx = g(x);
    if (std::abs(gx) < tol) return x;
    if (gx > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double d = dens(x);
    double next = d > 0.0 ? x - gx / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
      return next;
    }
    x = next;
  }
  throw AccuracyError("quantile search did not converge", x);
}

}  // namespace

double hier_quantile(double p, const HierPosterior& post) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("hier_quantile: p must lie in (0, 1)");
  const auto [lo, hi] = hier_support(post);
  const double center = post.conjugate.mean + raw_correction(post);
  double spread = post.conjugate.sd;
  if (post.has_design_factor() && post.log_normalizer >= std::log(kDegenerateMass)) {
    spread = hier_posterior_sd(post);
  }
  const double start = center + spread * norm_quantile(p);
  return newton_bracketed([&](double t) { return hier_cdf(t, post) - p; },
                          [&](double t) { return hier_density(t, post); }, lo, hi, start,
                          1e-11);
}

HierCdfTable::HierCdfTable(HierPosterior post, std::size_t panels) : post_(std::move(post)) {
  if (panels < 1) throw DomainError("HierCdfTable: need at least one panel");
  const auto [lo, hi] = hier_support(post_);
  nodes_.resize(panels + 1);
  for (std::size_t k = 0; k <= panels; ++k) {
    nodes_[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(panels);
  }
  nodes_.back() = hi;
  cumulative_.assign(panels + 1, 0.0);
  auto density = [this](double t) { return hier_density(t, post_); };
  for (std::size_t k = 0; k < panels; ++k) {
    cumulative_[k + 1] = cumulative_[k] + integrate(density, nodes_[k], nodes_[k + 1], 1e-15).value;
  }
}

double HierCdfTable::partial(std::size_t panel, double theta) const {
  if (theta <= nodes_[panel]) return 0.0;
  return integrate([this](double t) { return hier_density(t, post_); }, nodes_[panel], theta,
                   1e-15)
      .value;
}

double HierCdfTable::cdf(double theta) const {
  if (theta <= nodes_.front()) return 0.0;
  if (theta >= nodes_.back()) return 1.0;
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), theta);
  const auto k = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  return std::clamp((cumulative_[k] + partial(k, theta)) / cumulative_.back(), 0.0, 1.0);
}

double HierCdfTable::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("HierCdfTable::quantile: p must lie in (0, 1)");
  const double target = p * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  std::size_t k = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  k = std::min(k, nodes_.size() - 2);
  const double remainder = target - cumulative_[k];
  const double mass = cumulative_[k + 1] - cumulative_[k];
  const double frac = mass > 0.0 ? std::clamp(remainder / mass, 0.0, 1.0) : 0.5;
  const double start = nodes_[k] + frac * (nodes_[k + 1] - nodes_[k]);
  return newton_bracketed([&](double t) { return partial(k, t) - remainder; },
                          [&](double t) { return hier_density(t, post_); }, nodes_[k],
                          nodes_[k + 1], start, 1e-13);
}

std::vector<double> sample_grid(const HierPosterior& post, std::size_t m, RngStream& rng) {
  if (m < 1) throw DomainError("sample_grid: m must be >= 1");
  const HierCdfTable table(post);
  std::vector<double> draws(m);
  for (double& d : draws) d = table.quantile(rng.uniform());
  return draws;
}

double default_mcmc_step(const HierPosterior& post) { return 2.4 * post.conjugate.sd; }

McmcResult sample_mcmc(const HierPosterior& post, std::size_t m, std::size_t burn_in, double step,
                       RngStream& rng) {
  if (m < 1) throw DomainError("sample_mcmc: m must be >= 1");
  if (!(step > 0.0)) step = default_mcmc_step(post);
  McmcResult result;
  result.draws.reserve(m);
  double theta = post.conjugate.mean;
  double lp = hier_log_density(theta, post);
  std::size_t accepted = 0;
  const std::size_t total = burn_in + m;
  for (std::size_t i = 0; i < total; ++i) {
    const double proposal = theta + step * rng.normal();
    const double lp_prop = hier_log_density(proposal, post);
    if (std::log(rng.uniform()) < lp_prop - lp) {
      theta = proposal;
      lp = lp_prop;
      ++accepted;
    }
    if (i >= burn_in) result.draws.push_back(theta);
  }
  result.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(total);
  result.tuning_warning = result.acceptance_rate < 0.1 || result.acceptance_rate > 0.9;
  return result;
}

std::vector<double> thin(std::span<const double> draws, std::size_t every) {
  if (every < 1) throw DomainError("thin: interval must be >= 1");
  std::vector<double> out;
  out.reserve(draws.size() / every + 1);
  for (std::size_t i = 0; i < draws.size(); i += every) out.push_back(draws[i]);
  return out;
}

double empirical_bayes_b(const TrialSummary& summary) {
  if (summary.x != 1) throw UnsupportedError("empirical_bayes_b: requires a continued trial");
  if (!(summary.ybar1 * summary.ybar > 0.0)) {
    throw UnsupportedError("empirical_bayes_b: first-stage and overall means must share a sign");
  }
  return summary.ybar1 / (2.0 * summary.ybar);
}

namespace {

// Type-7 (linear interpolation) sample quantile of sorted data.
double sorted_quantile(std::span<const double> sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

PosteriorSummary summarize_closed_form(const HierPosterior& post, std::span<const double> probs) {
  PosteriorSummary s;
  s.method = "closed_form";
  s.mean = hier_posterior_mean(post);
  s.sd = hier_posterior_sd(post);
  s.mode = hier_posterior_mode(post);
  s.normalizer = post.normalizer;
  for (double p : probs) s.quantiles[p] = hier_quantile(p, post);
  return s;
}

PosteriorSummary summarize_quadrature(const HierPosterior& post, std::span<const double> probs) {
  PosteriorSummary s;
  s.method = "quadrature";
  const auto [lo, hi] = hier_support(post);
  s.normalizer = post.normalizer;
  s.mean = integrate([&](double t) { return t * hier_density(t, post); }, lo, hi).value;
  const double var =
      integrate([&](double t) { return (t - s.mean) * (t - s.mean) * hier_density(t, post); }, lo,
                hi)
          .value;
  s.sd = std::sqrt(std::max(var, 0.0));
  s.mode = hier_posterior_mode(post);
  for (double p : probs) s.quantiles[p] = hier_quantile(p, post);
  return s;
}

double kde_mode(std::span<const double> draws) {
  if (draws.size() < 2) throw DomainError("kde_mode: need at least two draws");
  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : sorted) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const double iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd > 0.0 ? sd : 1.0;
  const double bw = 0.9 * spread * std::pow(n, -0.2);

  // Linear binning, then the kernel sum at 512 grid points.
  constexpr std::size_t kBins = 4096;
  constexpr std::size_t kGrid = 512;
  const double lo = sorted.front() - 3.0 * bw;
  const double hi = sorted.back() + 3.0 * bw;
  const double bin_width = (hi - lo) / static_cast<double>(kBins - 1);
  std::vector<double> weight(kBins, 0.0);
  for (double v : sorted) {
    const double pos = (v - lo) / bin_width;
    const auto k = std::min(static_cast<std::size_t>(pos), kBins - 2);
    const double frac = pos - static_cast<double>(k);
    weight[k] += 1.0 - frac;
    weight[k + 1] += frac;
  }
  double best_x = lo;
  double best_val = -1.0;
  const double reach = 6.0 * bw;
  for (std::size_t g = 0; g < kGrid; ++g) {
    const double x = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(kGrid - 1);
    const auto first = static_cast<std::size_t>(std::max(0.0, (x - reach - lo) / bin_width));
    const auto last = std::min(kBins - 1, static_cast<std::size_t>((x + reach - lo) / bin_width));
    double val = 0.0;
    for (std::size_t k = first; k <= last; ++k) {
      if (weight[k] == 0.0) continue;
      const double z = (x - (lo + static_cast<double>(k) * bin_width)) / bw;
      val += weight[k] * std::exp(-0.5 * z * z);
    }
    if (val > best_val) {
      best_val = val;
      best_x = x;
    }
  }
  return best_x;
}

PosteriorSummary summarize_draws(std::span<const double> draws, double normalizer,
                                 std::span<const double> probs, std::string method) {
  if (draws.size() < 2) throw DomainError("summarize_draws: need at least two draws");
  PosteriorSummary s;
  s.method = std::move(method);
  s.normalizer = normalizer;
  const double n = static_cast<double>(draws.size());
  s.mean = std::accumulate(draws.begin(), draws.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : draws) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / (n - 1.0));
  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  for (double p : probs) s.quantiles[p] = sorted_quantile(sorted, p);
  s.mode = kde_mode(sorted);
  return s;
}

}  // namespace seqparadox
