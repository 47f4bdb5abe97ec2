#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "seqparadox/errors.hpp"
#include "seqparadox/freq_inference.hpp"
#include "seqparadox/stats_core.hpp"

using namespace seqparadox;
using doctest::Approx;

namespace {
const DesignConfig kExampleTruth{5, 2.0, 1.0, Investigator::B};  // theta = 2
}

TEST_CASE("mle is the pooled mean") {
  const TrialSummary s = summarize(fixture::table1());
  CHECK(mle(s) == Approx(0.88023177).epsilon(1e-12));
  CHECK(mle(TrialSummary{0.4, 0.4, 0}) == 0.4);
  CHECK(mle(summarize(TrialData{{2.5, 2.5}, std::vector<double>{2.5, 2.5}, 1})) == 2.5);
}

TEST_CASE("continuation probability") {
  CHECK(continuation_prob(1.0, kExampleTruth) == 0.5);
  // mpmath: ncdf(-sqrt(5)/2)
  CHECK(continuation_prob(2.0, kExampleTruth) == Approx(0.131776238641486365).epsilon(1e-13));
  DesignConfig never_stops = kExampleTruth;
  never_stops.psi = kInf;
  CHECK(continuation_prob(2.0, never_stops) == 1.0);
  DesignConfig a = kExampleTruth;
  a.investigator = Investigator::A;
  CHECK(continuation_prob(50.0, a) == 1.0);
}

TEST_CASE("marginal estimator mean") {
  // mpmath: 2 + 2/(2 sqrt 5) npdf(sqrt(5)/2)
  CHECK(marginal_estimator_mean(2.0, kExampleTruth) == Approx(2.09549728230671131).epsilon(1e-14));
  DesignConfig far = kExampleTruth;
  far.psi = 1e6;
  CHECK(marginal_estimator_mean(2.0, far) == 2.0);
  far.psi = -1e6;
  CHECK(marginal_estimator_mean(2.0, far) == 2.0);
  CHECK(marginal_estimator_mean(1.0, kExampleTruth) ==
        Approx(1.0 + 2.0 / (2 * std::sqrt(5.0)) * 0.3989422804014327).epsilon(1e-15));
}

TEST_CASE("conditional estimator means") {
  CHECK(conditional_estimator_mean(2.0, kExampleTruth, 0) ==
        Approx(2.21998311162847302).epsilon(1e-14));
  CHECK(conditional_estimator_mean(2.0, kExampleTruth, 0) ==
        Approx(truncated_normal_mean(2.0, 2.0 / std::sqrt(5.0), 1.0, kInf)).epsilon(1e-14));
  CHECK(conditional_estimator_mean(2.0, kExampleTruth, 1) ==
        Approx(1.27530726866075196).epsilon(1e-14));
  CHECK_THROWS_AS(conditional_estimator_mean(2.0, kExampleTruth, 2), DomainError);

  DesignConfig extreme = kExampleTruth;
  extreme.psi = 2.0 - 40.0 * 2.0 / std::sqrt(5.0);  // z = -40: continuing has mass ~1e-350
  CHECK_THROWS_AS(conditional_estimator_mean(2.0, extreme, 1), DegenerateError);
  CHECK(std::isfinite(conditional_estimator_mean(2.0, extreme, 0)));
}

TEST_CASE("conditional means agree with an independent Monte Carlo") {
  oracle::StdNormal normal(17);
  constexpr int kReps = 200000;
  const double se_mean = 2.0 / std::sqrt(5.0);
  double s0 = 0, s0q = 0, s1 = 0, s1q = 0, all = 0, allq = 0;
  int n0 = 0, n1 = 0;
  for (int i = 0; i < kReps; ++i) {
    const double ybar1 = 2.0 + se_mean * normal();
    double est = ybar1;
    if (ybar1 <= 1.0) {
      est = 0.5 * (ybar1 + 2.0 + se_mean * normal());
      s1 += est;
      s1q += est * est;
      ++n1;
    } else {
      s0 += est;
      s0q += est * est;
      ++n0;
    }
    all += est;
    allq += est * est;
  }
  auto check = [](double s, double sq, int n, double target) {
    const double m = s / n;
    const double se = std::sqrt((sq / n - m * m) / n);
    CHECK(std::abs(m - target) < 4 * se);
  };
  check(s0, s0q, n0, conditional_estimator_mean(2.0, kExampleTruth, 0));
  check(s1, s1q, n1, conditional_estimator_mean(2.0, kExampleTruth, 1));
  check(all, allq, kReps, marginal_estimator_mean(2.0, kExampleTruth));
}

TEST_CASE("law of total expectation over random designs") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> loc(-3, 3);
  std::uniform_real_distribution<double> scale(0.3, 4);
  std::uniform_int_distribution<int> size(1, 50);
  for (int i = 0; i < 1000; ++i) {
    const DesignConfig d{size(gen), scale(gen), loc(gen), Investigator::B};
    const double theta = loc(gen);
    const double z = std::abs(std::sqrt(d.n) / d.sigma * (d.psi - theta));
    if (z > 38.0) {  // Phi(-38) < 1e-300
      CHECK_THROWS_AS(bias_report(theta, d), DegenerateError);
    }
    if (z > 30.0) continue;
    const BiasReport r = bias_report(theta, d);
    const double recombined = r.cond_mean_stop * (1 - r.continuation_prob) +
                              r.cond_mean_continue * r.continuation_prob;
    REQUIRE(std::abs(recombined - r.marginal_mean) < 1e-12);
    REQUIRE(r.cond_mean_stop - theta >= 0.0);
    REQUIRE(r.cond_mean_continue - theta <= 0.0);
    if (std::abs(std::sqrt(d.n) / d.sigma * (d.psi - theta)) < 5.0) {
      REQUIRE(r.cond_mean_stop - theta > 0.0);
      REQUIRE(r.cond_mean_continue - theta < 0.0);
    }
  }
}

TEST_CASE("marginal bias peaks at psi = theta and decays exponentially") {
  const DesignConfig d{5, 2.0, 0.0, Investigator::B};
  const double peak = marginal_estimator_mean(0.0, d);
  const double three_se = 3.0 * 2.0 / std::sqrt(5.0);
  for (double offset : {-0.5, 0.3, 1.0}) CHECK(marginal_estimator_mean(offset, d) - offset < peak);
  CHECK(marginal_estimator_mean(three_se, d) - three_se < 0.012 * peak);
  CHECK(marginal_estimator_mean(-three_se, d) + three_se < 0.012 * peak);
}

TEST_CASE("bias-corrected estimate for the worked example") {
  const TrialSummary s = summarize(fixture::table1());
  const double bc = bias_corrected_estimate(s, fixture::example_design(Investigator::B));
  CHECK(bc == Approx(1.19982777035).epsilon(1e-10));
  CHECK(std::round(bc * 10) / 10 == Approx(1.2));

  const DesignConfig d = fixture::example_design(Investigator::B);
  CHECK(bias_corrected_estimate(TrialSummary{-10, -10, 1}, d) ==
        Approx(-10.0).epsilon(1e-12));
  CHECK(bias_corrected_estimate(TrialSummary{-1.5, -1.5, 1}, d) > -1.5);
  CHECK(bias_corrected_estimate(TrialSummary{1.0, 1.0, 1}, d) ==
        Approx(1.0 + 2.0 / (2 * std::sqrt(5.0)) * 0.3989422804014327 / 0.5).epsilon(1e-14));
  CHECK_THROWS_AS(bias_corrected_estimate(TrialSummary{2.0, 2.0, 0}, d), UnsupportedError);
}
