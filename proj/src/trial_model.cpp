#include "seqparadox/trial_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string>

#include "seqparadox/errors.hpp"

namespace seqparadox {

namespace {

constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double gaussian_log_density_sum(std::span<const double> ys, double theta, double sigma) {
  double ss = 0.0;
  for (double y : ys) ss += (y - theta) * (y - theta);
  const double k = static_cast<double>(ys.size());
  return -k * (kLogSqrt2Pi + std::log(sigma)) - 0.5 * ss / (sigma * sigma);
}

}  // namespace

std::string_view to_string(Investigator who) { return who == Investigator::A ? "A" : "B"; }

Investigator parse_investigator(std::string_view text) {
  if (text.size() == 1) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
    if (c == 'A') return Investigator::A;
    if (c == 'B') return Investigator::B;
  }
  throw DomainError("investigator must be A or B, got '" + std::string(text) + "'");
}

void DesignConfig::validate() const {
  if (n < 1) throw DomainError("design: n must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("design: sigma must be > 0");
  if (std::isnan(psi)) throw DomainError("design: psi is NaN");
}

bool DesignConfig::continues(double ybar1) const {
  return investigator == Investigator::A || ybar1 <= psi;
}

void TrialData::validate() const {
  if (y1.empty()) throw DomainError("trial data: empty first stage");
  if (x != 0 && x != 1) throw DomainError("trial data: x must be 0 or 1");
  if ((x == 1) != y2.has_value()) {
    throw DomainError("trial data: second stage must be present iff x = 1");
  }
  if (y2 && y2->size() != y1.size()) {
    throw DomainError("trial data: stages must have equal size");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(y1.begin(), y1.end(), finite) ||
      (y2 && !std::all_of(y2->begin(), y2->end(), finite))) {
    throw DomainError("trial data: non-finite outcome");
  }
}

TrialData simulate_trial(const DesignConfig& design, double theta, RngStream& rng) {
  design.validate();
  const auto n = static_cast<std::size_t>(design.n);
  TrialData data;
  data.y1.resize(n);
  for (double& y : data.y1) y = theta + design.sigma * rng.normal();
  data.x = design.continues(mean_of(data.y1)) ? 1 : 0;
  if (data.x == 1) {
    std::vector<double> y2(n);
    for (double& y : y2) y = theta + design.sigma * rng.normal();
    data.y2 = std::move(y2);
  }
  return data;
}

TrialSummary summarize(const TrialData& data) {
  data.validate();
  TrialSummary s;
  s.x = data.x;
  const double sum1 = std::accumulate(data.y1.begin(), data.y1.end(), 0.0);
  s.ybar1 = sum1 / static_cast<double>(data.y1.size());
  if (data.y2) {
    const double sum2 = std::accumulate(data.y2->begin(), data.y2->end(), 0.0);
    s.ybar = (sum1 + sum2) / static_cast<double>(2 * data.y1.size());
  } else {
    s.ybar = s.ybar1;
  }
  return s;
}

double log_likelihood(const TrialData& data, double theta, const DesignConfig& design,
                      bool include_design_factor) {
  data.validate();
  design.validate();
  if (data.y1.size() != static_cast<std::size_t>(design.n)) {
    throw InconsistencyError("log_likelihood: first stage size differs from design n");
  }
  double ll = gaussian_log_density_sum(data.y1, theta, design.sigma);
  if (data.y2) ll += gaussian_log_density_sum(*data.y2, theta, design.sigma);

  if (include_design_factor) {
    // P(X = x | first stage) is an indicator under both designs.
    const int expected = design.continues(mean_of(data.y1)) ? 1 : 0;
    if (expected != data.x) {
      throw InconsistencyError("log_likelihood: x = " + std::to_string(data.x) +
                               " is impossible under investigator " +
                               std::string(to_string(design.investigator)));
    }
  }
  return ll;
}

double check_likelihood_proportionality(const TrialData& data, const DesignConfig& design_a,
                                        const DesignConfig& design_b,
                                        std::span<const double> theta_grid) {
  if (theta_grid.empty()) return 0.0;
  auto diff = [&](double theta) {
    return log_likelihood(data, theta, design_b, true) -
           log_likelihood(data, theta, design_a, true);
  };
  const double ref = diff(theta_grid.front());
  double worst = 0.0;
  for (double theta : theta_grid) worst = std::max(worst, std::abs(diff(theta) - ref));
  return worst;
}

GreedyTrialData greedy_from_raw(std::vector<int> raw) {
  if (raw.empty()) throw DomainError("greedy: need at least one outcome");
  GreedyTrialData data;
  // Compare prefix means as exact fractions: s_i / i > s_best / best.
  long long sum = 0;
  long long best_sum = 0;
  std::size_t best = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] != 0 && raw[i] != 1) throw DomainError("greedy: outcomes must be 0/1");
    sum += raw[i];
    const auto len = static_cast<long long>(i + 1);
    if (best == 0 || sum * static_cast<long long>(best) > best_sum * len) {
      best = i + 1;
      best_sum = sum;
    }
  }
  data.n0 = best;
  data.retained.assign(raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(best));
  data.raw = std::move(raw);
  return data;
}

GreedyTrialData simulate_greedy(std::size_t n_total, double p, RngStream& rng) {
  if (n_total < 1) throw DomainError("simulate_greedy: N must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("simulate_greedy: p must lie in [0, 1]");
  std::vector<int> raw(n_total);
  for (int& r : raw) r = rng.bernoulli(p) ? 1 : 0;
  return greedy_from_raw(std::move(raw));
}

double greedy_log_likelihood(const GreedyTrialData& data, double p, GreedyLikelihood kind) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("greedy_log_likelihood: p must lie in (0, 1)");
  const auto& ys = kind == GreedyLikelihood::full ? data.raw : data.retained;
  const double successes = std::accumulate(ys.begin(), ys.end(), 0.0);
  const double failures = static_cast<double>(ys.size()) - successes;
  return successes * std::log(p) + failures * std::log1p(-p);
}

double check_greedy_proportionality(const GreedyTrialData& data,
                                    std::span<const double> p_grid) {
  if (p_grid.empty()) return 0.0;
  auto diff = [&](double p) {
    return greedy_log_likelihood(data, p, GreedyLikelihood::naive_prefix) -
           greedy_log_likelihood(data, p, GreedyLikelihood::full);
  };
  const double ref = diff(p_grid.front());
  double worst = 0.0;
  for (double p : p_grid) worst = std::max(worst, std::abs(diff(p) - ref));
  return worst;
}

}  // namespace seqparadox
