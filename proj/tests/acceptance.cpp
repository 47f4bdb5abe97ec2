// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "seqparadox/bayes_inference.hpp"
#include "seqparadox/calibration.hpp"
#include "seqparadox/freq_inference.hpp"
#include "seqparadox/io.hpp"
#include "seqparadox/quadrature.hpp"
#include "seqparadox/stats_core.hpp"
#include "seqparadox/uniformity.hpp"

using namespace seqparadox;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string num(double v, int digits = 7) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

const ThetaPrior kPrior{1.0, 2.0, false};
const DesignPrior kDesignPrior{-0.5, 1.0, 0.1};

DesignConfig design(Investigator who) { return fixture::example_design(who); }

HierPosterior example(Investigator who) {
  return make_hier_posterior(summarize(fixture::table1()), kPrior, kDesignPrior, design(who));
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// --- 1 -----------------------------------------------------------------------

Outcome worked_example() {
  Outcome o;
  const TrialSummary s = summarize(fixture::table1());
  const DesignConfig d = design(Investigator::B);
  const double estimate = mle(s);
  const double corrected = bias_corrected_estimate(s, d);
  const double conj = conjugate_posterior(s, kPrior, d).mean;
  o.require(num(estimate, 2) == "0.88", "MLE prints " + num(estimate, 2));
  o.require(num(corrected, 1) == "1.2", "bias-corrected prints " + num(corrected, 1));
  o.require(std::abs(corrected - 1.1998) <= 5e-4, "bias-corrected " + num(corrected));
  o.require(std::abs(conj - 0.8911) <= 5e-5, "conjugate mean " + num(conj));
  o.note("MLE " + num(estimate, 2) + ", bias-corrected " + num(corrected, 4) + ", conjugate mean " +
         num(conj, 7));
  return o;
}

// --- 2 -----------------------------------------------------------------------

Outcome hierarchical_example() {
  Outcome o;
  const double b = hier_posterior_mean(example(Investigator::B));
  const double a = hier_posterior_mean(example(Investigator::A));
  o.require(std::abs(b - 1.6247) <= 5e-5, "B mean " + num(b));
  o.require(std::abs(a - 0.8911) <= 5e-5, "A mean " + num(a));
  o.note("B mean " + num(b) + ", A mean " + num(a));
  return o;
}

// --- 3 -----------------------------------------------------------------------

Outcome sampler_agreement() {
  Outcome o;
  const HierPosterior b = example(Investigator::B);
  const HierPosterior a = example(Investigator::A);
  RngStream rb(3001, 0);
  RngStream ra(3001, 1);
  const McmcResult chain_b = sample_mcmc(b, 200000, kDefaultBurnIn, 0.0, rb);
  const McmcResult chain_a = sample_mcmc(a, 200000, kDefaultBurnIn, 0.0, ra);
  const double mb = mean_of(chain_b.draws);
  const double ma = mean_of(chain_a.draws);
  o.require(std::abs(mb - 1.6211) <= 0.02 && std::abs(mb - 1.6247) <= 0.02, "B draw mean " + num(mb, 4));
  o.require(std::abs(ma - 0.8887) <= 0.02 && std::abs(ma - 0.8911) <= 0.02, "A draw mean " + num(ma, 4));
  RngStream rg(3001, 2);
  const auto grid = sample_grid(b, 20000, rg);
  const auto thinned = thin(chain_b.draws, kDefaultThinning);
  const TwoSampleKs ks = two_sample_ks(thinned, grid);
  o.require(ks.p_value > 0.01, "KS p " + num(ks.p_value, 4));
  o.note("draw means B " + num(mb, 4) + ", A " + num(ma, 4) + "; KS thinned MCMC vs inverse-CDF p = " +
         num(ks.p_value, 3));
  return o;
}

// --- 4 -----------------------------------------------------------------------

Outcome bias_oracle() {
  Outcome o;
  const BiasStudy s = bias_mc_study(2.0, design(Investigator::B), 1000000, 4001);
  struct Row {
    const char* name;
    double closed, target, mc, se;
  };
  const Row rows[] = {
      {"marginal", s.closed_form.marginal_mean, 2.0954994, s.mc_marginal_mean, s.se_marginal_mean},
      {"x=0", s.closed_form.cond_mean_stop, 2.2199850, s.mc_cond_mean_stop, s.se_cond_mean_stop},
      {"x=1", s.closed_form.cond_mean_continue, 1.2753380, s.mc_cond_mean_continue,
       s.se_cond_mean_continue},
      {"P(x=1)", s.closed_form.continuation_prob, 0.1317762, s.mc_continuation_prob,
       s.se_continuation_prob}};
  for (const Row& r : rows) {
    const double z = (r.mc - r.closed) / r.se;
    const double z_target = (r.mc - r.target) / r.se;
    o.require(std::abs(z) < 4.0, std::string(r.name) + " z " + num(z, 2));
    o.require(std::abs(z_target) < 4.0, std::string(r.name) + " vs listed target z " + num(z_target, 2));
    o.note(std::string(r.name) + " MC " + num(r.mc, 5) + " closed " + num(r.closed, 7) + " z " + num(z, 2));
  }
  return o;
}

// --- 5 -----------------------------------------------------------------------

Outcome likelihood_principle() {
  Outcome o;
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(-5.0 + 0.1 * i);
  const double dev = check_likelihood_proportionality(fixture::table1(), design(Investigator::A),
                                                      design(Investigator::B), grid);
  o.require(dev <= 1e-12, "A/B deviation " + sci(dev));

  std::vector<double> p_grid;
  for (int i = 1; i <= 99; ++i) p_grid.push_back(i / 100.0);
  double greedy_dev = 0.0;
  for (std::uint64_t i = 0; i < 20 && greedy_dev <= 1e-3; ++i) {
    RngStream rng(5001, i);
    greedy_dev = std::max(greedy_dev, check_greedy_proportionality(simulate_greedy(50, 0.5, rng), p_grid));
  }
  o.require(greedy_dev > 1e-3, "greedy deviation " + sci(greedy_dev));
  o.note("A vs B deviation " + sci(dev) + "; greedy naive vs full deviation " + num(greedy_dev, 3));
  return o;
}

// --- 6 -----------------------------------------------------------------------

Outcome consistency_sweep() {
  Outcome o;
  std::mt19937_64 gen(6001);
  std::uniform_real_distribution<double> loc(-2, 2);
  std::uniform_real_distribution<double> scale(0.3, 3);
  std::uniform_real_distribution<double> slope(-1.5, 1.5);
  std::uniform_int_distribution<int> size(1, 30);
  double worst_mass = 0, worst_quad = 0, worst_mgf = 0, worst_reduction = 0;
  int done = 0;
  while (done < 200) {
    const int x = done % 2;
    TrialSummary s{loc(gen), 0.0, x};
    s.ybar = x == 1 ? loc(gen) : s.ybar1;
    const ThetaPrior prior{loc(gen), scale(gen), false};
    DesignPrior dp{loc(gen), slope(gen), scale(gen)};
    const DesignConfig d{size(gen), scale(gen), loc(gen), Investigator::B};
    const HierPosterior p = make_hier_posterior(s, prior, dp, d);
    if (std::abs(p.standardized_offset()) > 6.0) continue;
    ++done;
    const auto [lo, hi] = hier_support(p);
    const double mass = integrate([&](double t) { return hier_density(t, p); }, lo, hi).value;
    const double closed = hier_posterior_mean(p);
    const double quad = integrate([&](double t) { return t * hier_density(t, p); }, lo, hi).value;
    constexpr double h = 1e-5;
    const double mgf = (hier_posterior_mgf(h, p) - hier_posterior_mgf(-h, p)) / (2 * h);
    worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
    worst_quad = std::max(worst_quad, std::abs(closed - quad));
    worst_mgf = std::max(worst_mgf, std::abs(closed - mgf));

    dp.b = 0.0;
    const HierPosterior r = make_hier_posterior(s, prior, dp, d);
    const double m = r.conjugate.mean;
    const double v = r.conjugate.sd;
    double gap = std::max(std::abs(hier_posterior_mean(r) - m), std::abs(hier_posterior_mode(r) - m));
    for (double z : {-2.0, -0.5, 0.0, 1.0, 2.5}) {
      const double t = m + z * v;
      gap = std::max(gap, std::abs(hier_density(t, r) - norm_pdf(z) / v));
      gap = std::max(gap, std::abs(hier_cdf(t, r) - norm_cdf(z)));
    }
    worst_reduction = std::max(worst_reduction, gap);
  }
  o.require(worst_mass <= 1e-8, "normalization " + sci(worst_mass));
  o.require(worst_quad <= 1e-6, "quadrature mean " + sci(worst_quad));
  o.require(worst_mgf <= 1e-6, "MGF mean " + sci(worst_mgf));
  o.require(worst_reduction <= 1e-10, "b=0 reduction " + sci(worst_reduction));
  o.note("max |mass-1| " + sci(worst_mass) + ", |closed-quad| " + sci(worst_quad) + ", |closed-mgf| " +
         sci(worst_mgf) + ", b=0 gap " + sci(worst_reduction));
  return o;
}

// --- 7 -----------------------------------------------------------------------

UniverseConfig universe(bool joint, std::uint64_t seed) {
  UniverseConfig cfg;
  cfg.theta_prior = kPrior;
  if (joint) cfg.design_prior = kDesignPrior;
  cfg.design = design(Investigator::B);
  cfg.n_reps = 2000;
  cfg.master_seed = seed;
  return cfg;
}

Outcome calibration_suite() {
  Outcome o;
  const double fixed = run_sbc(universe(false, 7001), PosteriorKind::conjugate, std::nullopt).ks_p_value;
  const double hier = run_sbc(universe(true, 7002), PosteriorKind::hierarchical, 1).ks_p_value;
  const double misspec = run_sbc(universe(true, 7003), PosteriorKind::conjugate, 1).ks_p_value;
  const GreedyDemo greedy = greedy_miscalibration_demo(50, 1.0, 1.0, 2000, 7004);
  o.require(fixed > 0.01, "conjugate fixed-psi p " + num(fixed, 4));
  o.require(hier > 0.01, "hierarchical x=1 p " + num(hier, 4));
  o.require(misspec < 0.01, "misspecified p " + num(misspec, 4));
  o.require(greedy.full.ks_p_value > 0.01, "greedy full p " + num(greedy.full.ks_p_value, 4));
  o.require(greedy.naive.ks_p_value < 0.01, "greedy naive p " + sci(greedy.naive.ks_p_value));
  o.note("KS p: conjugate/fixed " + num(fixed, 3) + ", hierarchical/x=1 " + num(hier, 3) +
         ", misspecified " + sci(misspec) + ", greedy full " + num(greedy.full.ks_p_value, 3) +
         ", greedy naive " + sci(greedy.naive.ks_p_value));
  return o;
}

// --- 8 -----------------------------------------------------------------------

Outcome empirical_bayes() {
  Outcome o;
  const double gap = eb_equivalence_check(summarize(fixture::table1()), design(Investigator::B));
  o.require(gap <= 1e-8, "gap " + sci(gap));
  o.note("|Bayes correction - frequentist correction| = " + sci(gap));
  return o;
}

// --- 9 -----------------------------------------------------------------------

#ifdef SEQPARADOX_CLI
std::string cli_bytes(const std::string& args, const std::filesystem::path& out) {
  std::filesystem::remove(out);
  const std::string cmd =
      std::string(SEQPARADOX_CLI) + " " + args + " --out " + out.string() + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return "<failed: " + args + ">";
  std::ifstream in(out, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}
#endif

Outcome determinism() {
  Outcome o;
  auto sbc = [](unsigned workers) {
    UniverseConfig cfg = universe(true, 9001);
    cfg.workers = workers;
    const SbcResult r = run_sbc_detailed(cfg, PosteriorKind::hierarchical, 1);
    return to_json(r.report).dump() + replicates_to_csv(r.replicates);
  };
  auto bias = [](unsigned workers) {
    return to_json(bias_mc_study(2.0, design(Investigator::B), 200000, 9002, workers)).dump();
  };
  auto greedy = [](unsigned workers) {
    return to_json(greedy_miscalibration_demo(50, 1.0, 1.0, 2000, 9003, workers)).dump();
  };
  auto shift = [](unsigned workers) {
    UniverseConfig cfg = universe(true, 9004);
    cfg.workers = workers;
    return to_json(selection_shift_study(cfg, 100000)).dump();
  };
  auto mcmc = [](unsigned) {
    RngStream rng(9005, 0);
    const auto draws = sample_mcmc(example(Investigator::B), 20000, kDefaultBurnIn, 0.0, rng).draws;
    std::string s;
    for (double d : draws) s += format_double(d) + '\n';
    return s;
  };
  const std::pair<const char*, std::function<std::string(unsigned)>> runs[] = {
      {"sbc", sbc}, {"bias", bias}, {"greedy", greedy}, {"shift", shift}, {"mcmc", mcmc}};
  for (const auto& [name, fn] : runs) {
    const std::string w1 = fn(1);
    o.require(w1 == fn(1), std::string(name) + " rerun differs");
    o.require(w1 == fn(4), std::string(name) + " differs with 4 workers");
  }
  int cli_checks = 0;
#ifdef SEQPARADOX_CLI
  const auto dir = std::filesystem::temp_directory_path() / "seqparadox_acceptance";
  std::filesystem::create_directories(dir);
  const std::string commands[] = {
      "calibrate --reps 500 --shift-reps 20000 --condition 1 --seed 11 --output json",
      "calibrate --reps 500 --shift-reps 20000 --condition 1 --seed 11 --output csv",
      "bias-study --reps 100000 --seed 12 --output json",
      "greedy-demo --reps 1000 --seed 13 --output json",
  };
  for (const std::string& c : commands) {
    const std::string a = cli_bytes(c + " --workers 1", dir / "a.out");
    const std::string b = cli_bytes(c + " --workers 4", dir / "b.out");
    const std::string again = cli_bytes(c + " --workers 1", dir / "c.out");
    o.require(a.rfind("<failed", 0) != 0, c);
    o.require(a == b && a == again, "CLI bytes differ: " + c);
    ++cli_checks;
  }
  const std::string sim = "simulate --n 5 --sigma 2 --psi 1 --theta 2 --investigator B --seed 1";
  o.require(cli_bytes(sim, dir / "a.out") == cli_bytes(sim, dir / "b.out"), "simulate bytes differ");
  ++cli_checks;
  for (const std::string rep : {"reproduce-example --output json", "posterior --method mcmc --seed 5 --output json"}) {
    o.require(cli_bytes(rep, dir / "a.out") == cli_bytes(rep, dir / "b.out"), rep);
    ++cli_checks;
  }
#endif
  o.note("5 library runs identical across reruns and 1 vs 4 workers; " + std::to_string(cli_checks) +
         " CLI commands byte-identical");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double budget_s;  // <= 0: no runtime bound
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "worked example: MLE, bias-corrected, conjugate mean", 1.0, worked_example},
      {2, "hierarchical posterior means", 1.0, hierarchical_example},
      {3, "MCMC and inverse-CDF samplers agree", 30.0, sampler_agreement},
      {4, "bias formulas vs 10^6-replicate Monte Carlo", 60.0, bias_oracle},
      {5, "likelihood proportionality (A vs B; greedy)", 0.0, likelihood_principle},
      {6, "normalization and mean consistency sweep", 120.0, consistency_sweep},
      {7, "simulation-based calibration suite", 300.0, calibration_suite},
      {8, "empirical-Bayes correction identity", 0.0, empirical_bayes},
      {9, "determinism across reruns and worker counts", 0.0, determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note(std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && seconds >= c.budget_s) {
      o.pass = false;
      o.note("runtime " + num(seconds, 2) + " s exceeds " + num(c.budget_s, 0) + " s");
    }
    if (!o.pass) ++failures;
    std::printf("%s [%d] %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, seconds,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures,
              std::size(criteria));
  return failures == 0 ? 0 : 1;
}
