// seqparadox: command-line front end for the sequential-design inference library.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "seqparadox/bayes_inference.hpp"
#include "seqparadox/calibration.hpp"
#include "seqparadox/errors.hpp"
#include "seqparadox/freq_inference.hpp"
#include "seqparadox/io.hpp"
#include "seqparadox/trial_model.hpp"

using namespace seqparadox;
using nlohmann::json;

namespace {

constexpr std::uint64_t kReproduceSeed = 20240517;

enum class Format { text, json, csv };

struct Common {
  std::string output = "text";
  std::string out_path;
  unsigned workers = 1;

  Format format() const {
    if (output == "json") return Format::json;
    if (output == "csv") return Format::csv;
    return Format::text;
  }
};

struct DesignFlags {
  int n = 5;
  double sigma = 2.0;
  double psi = 1.0;
  std::string investigator = "B";

  DesignConfig config() const {
    DesignConfig d{n, sigma, psi, parse_investigator(investigator)};
    d.validate();
    return d;
  }
};

struct PriorFlags {
  double mu = 1.0;
  double tau = 2.0;
  bool flat = false;
  double a = -0.5;
  double b = 1.0;
  double omega = 0.1;

  ThetaPrior theta_prior() const {
    if (flat) return ThetaPrior::flat_prior();
    ThetaPrior p{mu, tau, false};
    p.validate();
    return p;
  }
  DesignPrior design_prior() const {
    DesignPrior p{a, b, omega};
    p.validate();
    return p;
  }
};

std::string fixed(double v, int digits) {
  if (!std::isfinite(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void emit(const Common& common, const std::string& text) {
  if (common.out_path.empty()) {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw IoError("cannot write to standard output");
  } else {
    write_file_atomic(common.out_path, text);
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void add_common(CLI::App* cmd, Common& common, bool csv_allowed = true) {
  std::vector<std::string> formats{"text", "json"};
  if (csv_allowed) formats.push_back("csv");
  cmd->add_option("--output", common.output, "Report format")
      ->check(CLI::IsMember(formats))
      ->capture_default_str();
  cmd->add_option("--out", common.out_path, "Write the report to this file instead of stdout");
}

void add_design(CLI::App* cmd, DesignFlags& d, bool with_investigator = true) {
  cmd->add_option("--n", d.n, "Observations per stage")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--sigma", d.sigma, "Known outcome sd")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--psi", d.psi, "Interim stopping threshold")->capture_default_str();
  if (!with_investigator) return;
  cmd->add_option("--investigator", d.investigator, "A (fixed design) or B (sequential)")
      ->check(CLI::IsMember({"A", "B"}))
      ->capture_default_str();
}

void add_priors(CLI::App* cmd, PriorFlags& p) {
  cmd->add_option("--mu", p.mu, "Prior mean of theta")->capture_default_str();
  cmd->add_option("--tau", p.tau, "Prior sd of theta")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_flag("--flat", p.flat, "Use the flat prior on theta");
  cmd->add_option("--a", p.a, "Design prior intercept")->capture_default_str();
  cmd->add_option("--b", p.b, "Design prior slope")->capture_default_str();
  cmd->add_option("--omega", p.omega, "Design prior residual sd")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

std::string default_data_path() { return std::string(SEQPARADOX_DATA_DIR) + "/table1.csv"; }

// --- reproduce-example ----------------------------------------------------

struct ReproduceFlags {
  Common common;
  PriorFlags prior;
  DesignFlags design;
  std::string data = default_data_path();
  std::string investigator = "both";
  std::size_t draws = 200000;
  std::uint64_t seed = kReproduceSeed;
};

struct InvestigatorResult {
  Investigator who;
  double mean, mode, sd, median, correction;
  double draw_mean, draw_mode, acceptance;
};

InvestigatorResult analyse(Investigator who, const TrialSummary& summary, const ReproduceFlags& f,
                           std::uint64_t stream) {
  DesignConfig design = f.design.config();
  design.investigator = who;
  const HierPosterior post =
      make_hier_posterior(summary, f.prior.theta_prior(), f.prior.design_prior(), design);
  RngStream rng(f.seed, stream);
  const McmcResult chain = sample_mcmc(post, f.draws, kDefaultBurnIn, 0.0, rng);
  if (chain.tuning_warning) {
    std::cerr << "warning: Metropolis acceptance rate " << fixed(chain.acceptance_rate, 3)
              << " is outside [0.1, 0.9]\n";
  }
  double sum = 0.0;
  for (double d : chain.draws) sum += d;
  return {who,
          hier_posterior_mean(post),
          hier_posterior_mode(post),
          hier_posterior_sd(post),
          hier_quantile(0.5, post),
          correction_term(post),
          sum / static_cast<double>(chain.draws.size()),
          kde_mode(chain.draws),
          chain.acceptance_rate};
}

void run_reproduce(const ReproduceFlags& f) {
  const TrialData data = read_trial_data(f.data);
  const TrialSummary summary = summarize(data);
  DesignConfig design_b = f.design.config();
  design_b.investigator = Investigator::B;
  const ConjugatePosterior conj = conjugate_posterior(summary, f.prior.theta_prior(), design_b);
  const double estimate = mle(summary);
  std::optional<double> corrected;
  if (summary.x == 1) corrected = bias_corrected_estimate(summary, design_b);

  std::vector<Investigator> who;
  if (f.investigator != "B") who.push_back(Investigator::A);
  if (f.investigator != "A") who.push_back(Investigator::B);
  std::vector<InvestigatorResult> results;
  for (Investigator w : who) {
    if (w == Investigator::A && summary.x == 0) continue;  // A never stops
    results.push_back(analyse(w, summary, f, w == Investigator::A ? 0 : 1));
  }

  // Density curves for plotting.
  std::vector<double> grid, conj_density;
  std::vector<std::vector<double>> hier_density_rows(results.size());
  for (int i = 0; i <= 200; ++i) grid.push_back(-1.0 + 5.0 * i / 200.0);
  for (double t : grid) conj_density.push_back(std::exp(-0.5 * std::pow((t - conj.mean) / conj.sd, 2)) /
                                               (conj.sd * std::sqrt(2.0 * M_PI)));
  for (std::size_t r = 0; r < results.size(); ++r) {
    DesignConfig d = f.design.config();
    d.investigator = results[r].who;
    const HierPosterior post =
        make_hier_posterior(summary, f.prior.theta_prior(), f.prior.design_prior(), d);
    for (double t : grid) hier_density_rows[r].push_back(hier_density(t, post));
  }

  switch (f.common.format()) {
    case Format::json: {
      json j;
      j["data"] = {{"n", data.y1.size()}, {"x", summary.x}, {"ybar1", summary.ybar1}, {"ybar", summary.ybar}};
      j["mle"] = estimate;
      j["bias_corrected"] = corrected ? json(*corrected) : json(nullptr);
      j["conjugate_posterior"] = {{"mean", conj.mean}, {"sd", conj.sd}};
      j["seed"] = f.seed;
      j["draws"] = f.draws;
      json inv = json::object();
      for (const auto& r : results) {
        inv[std::string(to_string(r.who))] = {{"mean", r.mean},           {"mode", r.mode},
                                 {"median", r.median},       {"sd", r.sd},
                                 {"correction", r.correction}, {"draw_mean", r.draw_mean},
                                 {"draw_mode", r.draw_mode}, {"acceptance_rate", r.acceptance}};
      }
      j["posterior"] = inv;
      json dens = {{"theta", grid}, {"conjugate", conj_density}};
      for (std::size_t r = 0; r < results.size(); ++r) {
        dens["investigator_" + std::string(to_string(results[r].who))] = hier_density_rows[r];
      }
      j["density_grid"] = dens;
      emit(f.common, dump(j));
      break;
    }
    case Format::csv: {
      std::string out = "theta,conjugate";
      for (const auto& r : results) out += ",investigator_" + std::string(to_string(r.who));
      out += '\n';
      for (std::size_t i = 0; i < grid.size(); ++i) {
        out += format_double(grid[i]) + ',' + format_double(conj_density[i]);
        for (const auto& row : hier_density_rows) out += ',' + format_double(row[i]);
        out += '\n';
      }
      emit(f.common, out);
      break;
    }
    case Format::text: {
      std::ostringstream s;
      s << "Data: n = " << data.y1.size() << ", x = " << summary.x
        << ", first-stage mean " << fixed(summary.ybar1, 4) << ", overall mean "
        << fixed(summary.ybar, 4) << "\n\n";
      s << "Frequentist\n";
      s << "  MLE                      " << fixed(estimate, 4) << "  (" << fixed(estimate, 2) << ")\n";
      if (corrected) {
        s << "  Bias-corrected estimate  " << fixed(*corrected, 4) << "  (" << fixed(*corrected, 1)
          << ")\n";
      }
      s << "\nBayesian\n";
      s << "  Conjugate posterior mean " << fixed(conj.mean, 4) << ", sd " << fixed(conj.sd, 4) << "\n\n";
      s << "                             ";
      for (const auto& r : results) s << "  Investigator " << to_string(r.who);
      s << "\n";
      auto row = [&](const char* label, double InvestigatorResult::*field) {
        s << "  " << label;
        for (const auto& r : results) s << "  " << std::string(14 - 6, ' ') << fixed(r.*field, 4);
        s << "\n";
      };
      row("Theoretical posterior mean ", &InvestigatorResult::mean);
      row("Theoretical posterior mode ", &InvestigatorResult::mode);
      row("Posterior median           ", &InvestigatorResult::median);
      row("Correction term            ", &InvestigatorResult::correction);
      row("Mean of posterior draws    ", &InvestigatorResult::draw_mean);
      row("Mode of posterior draws    ", &InvestigatorResult::draw_mode);
      s << "\n  " << f.draws << " Metropolis draws per investigator, seed " << f.seed
        << ". Density curves: --output csv or json.\n";
      emit(f.common, s.str());
      break;
    }
  }
}

// --- simulate ----------------------------------------------------------------

struct SimulateFlags {
  Common common;
  DesignFlags design;
  double theta = 0.0;
  std::uint64_t seed = 0;
};

void run_simulate(const SimulateFlags& f) {
  RngStream rng(f.seed, 0);
  const TrialData data = simulate_trial(f.design.config(), f.theta, rng);
  if (f.common.format() == Format::json) {
    json j = {{"y1", data.y1}, {"x", data.x}};
    j["y2"] = data.y2 ? json(*data.y2) : json(nullptr);
    emit(f.common, dump(j));
  } else {
    emit(f.common, trial_data_to_csv(data));
  }
}

// --- estimate ----------------------------------------------------------------

struct EstimateFlags {
  Common common;
  DesignFlags design;
  std::string data = default_data_path();
};

void run_estimate(const EstimateFlags& f) {
  const TrialSummary s = summarize(read_trial_data(f.data));
  const DesignConfig d = f.design.config();
  const double estimate = mle(s);
  std::optional<double> corrected;
  if (s.x == 1 && d.investigator == Investigator::B) corrected = bias_corrected_estimate(s, d);
  const double cont = continuation_prob(estimate, d);
  switch (f.common.format()) {
    case Format::json: {
      json j = {{"x", s.x}, {"ybar1", s.ybar1}, {"ybar", s.ybar}, {"mle", estimate},
                {"continuation_prob_at_mle", cont}};
      j["bias_corrected"] = corrected ? json(*corrected) : json(nullptr);
      emit(f.common, dump(j));
      break;
    }
    case Format::csv: {
      std::string out = "quantity,value\n";
      out += "x," + std::to_string(s.x) + "\nybar1," + format_double(s.ybar1) + "\nybar," +
             format_double(s.ybar) + "\nmle," + format_double(estimate) + "\nbias_corrected," +
             (corrected ? format_double(*corrected) : std::string()) +
             "\ncontinuation_prob_at_mle," + format_double(cont) + "\n";
      emit(f.common, out);
      break;
    }
    case Format::text: {
      std::ostringstream o;
      o << "MLE             " << fixed(estimate, 4) << "\n";
      if (corrected) o << "Bias-corrected  " << fixed(*corrected, 4) << "\n";
      else o << "Bias-corrected  not available (needs investigator B and a continued trial)\n";
      emit(f.common, o.str());
      break;
    }
  }
}

// --- posterior ---------------------------------------------------------------

struct PosteriorFlags {
  Common common;
  DesignFlags design;
  PriorFlags prior;
  std::string data = default_data_path();
  std::string method = "closed_form";
  std::size_t draws = 200000;
  std::optional<std::uint64_t> seed;
  std::vector<double> probs{0.025, 0.25, 0.5, 0.75, 0.975};
};

void run_posterior(const PosteriorFlags& f) {
  const TrialSummary s = summarize(read_trial_data(f.data));
  const HierPosterior post =
      make_hier_posterior(s, f.prior.theta_prior(), f.prior.design_prior(), f.design.config());
  PosteriorSummary summary;
  if (f.method == "closed_form") {
    summary = summarize_closed_form(post, f.probs);
  } else if (f.method == "quadrature") {
    summary = summarize_quadrature(post, f.probs);
  } else {
    if (!f.seed) throw DomainError("--seed is required for --method " + f.method);
    RngStream rng(*f.seed, 0);
    std::vector<double> draws;
    if (f.method == "grid") {
      draws = sample_grid(post, f.draws, rng);
    } else {
      McmcResult chain = sample_mcmc(post, f.draws, kDefaultBurnIn, 0.0, rng);
      if (chain.tuning_warning) {
        std::cerr << "warning: Metropolis acceptance rate " << fixed(chain.acceptance_rate, 3)
                  << " is outside [0.1, 0.9]\n";
      }
      draws = std::move(chain.draws);
    }
    summary = summarize_draws(draws, post.normalizer, f.probs, f.method);
  }
  switch (f.common.format()) {
    case Format::json:
      emit(f.common, dump(to_json(summary)));
      break;
    case Format::csv: {
      std::string out = "quantity,value\nmean," + format_double(summary.mean) + "\nmode," +
                        format_double(summary.mode) + "\nsd," + format_double(summary.sd) +
                        "\nnormalizer," + format_double(summary.normalizer) + "\n";
      for (const auto& [p, q] : summary.quantiles) out += "q" + format_double(p) + "," + format_double(q) + "\n";
      emit(f.common, out);
      break;
    }
    case Format::text: {
      std::ostringstream o;
      o << "Posterior (" << summary.method << ", investigator " << f.design.investigator << ")\n";
      o << "  mean        " << fixed(summary.mean, 4) << "\n";
      o << "  mode        " << fixed(summary.mode, 4) << "\n";
      o << "  sd          " << fixed(summary.sd, 4) << "\n";
      o << "  normalizer  " << fixed(summary.normalizer, 6) << "\n";
      for (const auto& [p, q] : summary.quantiles) {
        std::string label = "q" + format_double(p);
        label.resize(12, ' ');
        o << "  " << label << fixed(q, 4) << "\n";
      }
      emit(f.common, o.str());
      break;
    }
  }
}

// --- bias-study --------------------------------------------------------------

struct BiasFlags {
  Common common;
  DesignFlags design;
  double theta = 2.0;
  std::size_t reps = 1000000;
  std::uint64_t seed = 0;
};

void run_bias(const BiasFlags& f) {
  const BiasStudy s = bias_mc_study(f.theta, f.design.config(), f.reps, f.seed, f.common.workers);
  const json j = to_json(s);
  switch (f.common.format()) {
    case Format::json:
      emit(f.common, dump(j));
      break;
    case Format::csv: {
      std::string out = "quantity,closed_form,monte_carlo,mc_se,z\n";
      for (const char* key : {"marginal_mean", "cond_mean_stop", "cond_mean_continue", "continuation_prob"}) {
        const json& c = j["comparison"][key];
        auto cell = [](const json& v) { return v.is_null() ? std::string() : format_double(v.get<double>()); };
        out += std::string(key) + ',' + cell(c["closed_form"]) + ',' + cell(c["monte_carlo"]) + ',' +
               cell(c["mc_se"]) + ',' + cell(c["z"]) + '\n';
      }
      emit(f.common, out);
      break;
    }
    case Format::text: {
      std::ostringstream o;
      o << "theta = " << f.theta << ", psi = " << f.design.psi << ", " << f.reps << " replicates\n";
      o << "                      closed form   Monte Carlo     MC se       z\n";
      for (const char* key : {"marginal_mean", "cond_mean_stop", "cond_mean_continue", "continuation_prob"}) {
        const json& c = j["comparison"][key];
        auto cell = [](const json& v, int digits) {
          std::string t = v.is_null() ? "NA" : fixed(v.get<double>(), digits);
          return std::string(t.size() < 12 ? 12 - t.size() : 0, ' ') + t;
        };
        std::string label = key;
        label.resize(20, ' ');
        o << "  " << label << cell(c["closed_form"], 5) << "  " << cell(c["monte_carlo"], 5) << "  "
          << cell(c["mc_se"], 5) << "  " << cell(c["z"], 2) << "\n";
      }
      emit(f.common, o.str());
      break;
    }
  }
}

// --- calibrate ---------------------------------------------------------------

struct CalibrateFlags {
  Common common;
  DesignFlags design;
  PriorFlags prior;
  bool fixed_psi = false;
  std::string posterior = "hierarchical";
  std::optional<int> condition;
  std::size_t reps = 2000;
  std::size_t shift_reps = 100000;
  std::uint64_t seed = 0;
};

void run_calibrate(const CalibrateFlags& f) {
  UniverseConfig cfg;
  cfg.theta_prior = f.prior.theta_prior();
  if (!f.fixed_psi) cfg.design_prior = f.prior.design_prior();
  cfg.design = f.design.config();
  cfg.n_reps = f.reps;
  cfg.master_seed = f.seed;
  cfg.workers = f.common.workers;
  const PosteriorKind kind =
      f.posterior == "conjugate" ? PosteriorKind::conjugate : PosteriorKind::hierarchical;
  const SbcResult res = run_sbc_detailed(cfg, kind, f.condition);
  const double retention = expected_retention(cfg);
  UniverseConfig shift_cfg = cfg;
  shift_cfg.master_seed = f.seed + 1;
  const SelectionShift shift = selection_shift_study(shift_cfg, f.shift_reps);
  const SelectionShift shift_exact = selection_shift_closed_form(cfg);

  switch (f.common.format()) {
    case Format::json: {
      json j = to_json(res.report);
      j["posterior"] = f.posterior;
      j["condition_on_x"] = f.condition ? json(*f.condition) : json(nullptr);
      j["attempted"] = res.attempted;
      j["expected_retention"] = retention;
      j["selection_shift"] = to_json(shift);
      j["selection_shift"]["closed_form_continue"] = shift_exact.mean_theta_continue;
      j["selection_shift"]["closed_form_stop"] =
          std::isfinite(shift_exact.mean_theta_stop) ? json(shift_exact.mean_theta_stop) : json(nullptr);
      emit(f.common, dump(j));
      break;
    }
    case Format::csv:
      emit(f.common, replicates_to_csv(res.replicates));
      break;
    case Format::text: {
      std::ostringstream o;
      o << "SBC of the " << f.posterior << " posterior, " << res.report.n_used << " replicates";
      if (f.condition) o << " with x = " << *f.condition << " (" << res.attempted << " drawn)";
      o << "\n  KS statistic " << fixed(res.report.ks_statistic, 4) << ", p-value "
        << fixed(res.report.ks_p_value, 4) << (res.report.ks_p_value > 0.01 ? "  calibrated\n" : "  NOT calibrated\n");
      o << "  PIT histogram:";
      for (std::size_t c : res.report.histogram) o << ' ' << c;
      o << "\n  P(x = 1) under the prior " << fixed(retention, 4) << "\n";
      o << "Selection shift (" << f.shift_reps << " draws): E[theta] " << fixed(shift.mean_theta_all, 4)
        << ", given x = 1 " << fixed(shift.mean_theta_continue, 4) << " (exact "
        << fixed(shift_exact.mean_theta_continue, 4) << "), given x = 0 "
        << fixed(shift.mean_theta_stop, 4) << "\n";
      emit(f.common, o.str());
      break;
    }
  }
}

// --- greedy-demo -------------------------------------------------------------

struct GreedyFlags {
  Common common;
  std::size_t total = 50;
  double alpha = 1.0;
  double beta = 1.0;
  std::size_t reps = 2000;
  std::uint64_t seed = 0;
};

void run_greedy(const GreedyFlags& f) {
  const GreedyDemo d =
      greedy_miscalibration_demo(f.total, f.alpha, f.beta, f.reps, f.seed, f.common.workers);
  if (f.common.format() == Format::json) {
    emit(f.common, dump(to_json(d)));
    return;
  }
  std::ostringstream o;
  o << "Greedy design, N = " << f.total << ", p ~ Beta(" << f.alpha << ", " << f.beta << "), "
    << f.reps << " replicates\n";
  o << "  naive posterior (retained prefix)  KS p-value " << fixed(d.naive.ks_p_value, 4) << "\n";
  o << "  full posterior (all outcomes)      KS p-value " << fixed(d.full.ks_p_value, 4) << "\n";
  o << "  mean retained success rate " << fixed(d.mean_retained, 4) << " vs mean p "
    << fixed(d.mean_p, 4) << " (se of difference " << fixed(d.se_retained_minus_p, 4) << ")\n";
  emit(f.common, o.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inference after a one-interim sequential design: bias, posteriors and calibration"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read flag values from a key = value file; [subcommand] sections");

  ReproduceFlags reproduce;
  auto* rep = app.add_subcommand("reproduce-example", "Worked example: estimates, posteriors, draws");
  add_common(rep, reproduce.common);
  add_priors(rep, reproduce.prior);
  add_design(rep, reproduce.design, false);
  rep->add_option("--investigator", reproduce.investigator, "A, B or both")
      ->check(CLI::IsMember({"A", "B", "both"}))
      ->capture_default_str();
  rep->add_option("--data", reproduce.data, "Trial data CSV (y1,y2,x)")->capture_default_str();
  rep->add_option("--draws", reproduce.draws, "Metropolis draws per investigator")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  rep->add_option("--seed", reproduce.seed, "Sampler seed")->capture_default_str();

  SimulateFlags simulate;
  auto* sim = app.add_subcommand("simulate", "Simulate one trial; CSV in the y1,y2,x layout");
  add_common(sim, simulate.common);
  sim->get_option("--output")->default_str("csv");
  simulate.common.output = "csv";
  add_design(sim, simulate.design);
  sim->add_option("--theta", simulate.theta, "True effect")->required();
  sim->add_option("--seed", simulate.seed, "Random seed")->required();

  EstimateFlags estimate;
  auto* est = app.add_subcommand("estimate", "MLE and bias-corrected estimate");
  add_common(est, estimate.common);
  add_design(est, estimate.design);
  est->add_option("--data", estimate.data, "Trial data CSV (y1,y2,x)")->capture_default_str();

  PosteriorFlags posterior;
  auto* pst = app.add_subcommand("posterior", "Posterior summary for one investigator");
  add_common(pst, posterior.common);
  add_design(pst, posterior.design);
  add_priors(pst, posterior.prior);
  pst->add_option("--data", posterior.data, "Trial data CSV (y1,y2,x)")->capture_default_str();
  pst->add_option("--method", posterior.method, "How to compute the summary")
      ->check(CLI::IsMember({"closed_form", "quadrature", "mcmc", "grid"}))
      ->capture_default_str();
  pst->add_option("--draws", posterior.draws, "Sample size for mcmc/grid")
      ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()))
      ->capture_default_str();
  pst->add_option("--seed", posterior.seed, "Random seed (mcmc/grid)");
  pst->add_option("--probs", posterior.probs, "Quantile levels")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  BiasFlags bias;
  auto* bst = app.add_subcommand("bias-study", "Closed-form and Monte Carlo estimator means");
  add_common(bst, bias.common);
  add_design(bst, bias.design);
  bst->add_option("--theta", bias.theta, "True effect")->capture_default_str();
  bst->add_option("--reps", bias.reps, "Monte Carlo replicates (>= 10000)")->capture_default_str();
  bst->add_option("--seed", bias.seed, "Random seed")->required();
  bst->add_option("--workers", bias.common.workers, "Worker threads")->check(CLI::PositiveNumber);

  CalibrateFlags calibrate;
  auto* cal = app.add_subcommand("calibrate", "Simulation-based calibration over the joint prior");
  add_common(cal, calibrate.common);
  add_design(cal, calibrate.design);
  add_priors(cal, calibrate.prior);
  cal->add_flag("--fixed-psi", calibrate.fixed_psi, "Keep psi fixed instead of drawing it");
  cal->add_option("--posterior", calibrate.posterior, "Posterior to check")
      ->check(CLI::IsMember({"conjugate", "hierarchical"}))
      ->capture_default_str();
  cal->add_option("--condition", calibrate.condition, "Keep only replicates with this x")
      ->check(CLI::IsMember({0, 1}));
  cal->add_option("--reps", calibrate.reps, "Retained replicates")->check(CLI::PositiveNumber)->capture_default_str();
  cal->add_option("--shift-reps", calibrate.shift_reps, "Draws for the selection-shift study")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cal->add_option("--seed", calibrate.seed, "Random seed")->required();
  cal->add_option("--workers", calibrate.common.workers, "Worker threads")->check(CLI::PositiveNumber);

  GreedyFlags greedy;
  auto* grd = app.add_subcommand("greedy-demo", "Calibration of naive and full posteriors under greedy stopping");
  add_common(grd, greedy.common, false);
  grd->add_option("--N", greedy.total, "Outcomes observed")->check(CLI::PositiveNumber)->capture_default_str();
  grd->add_option("--alpha", greedy.alpha, "Beta prior alpha")->check(CLI::PositiveNumber)->capture_default_str();
  grd->add_option("--beta", greedy.beta, "Beta prior beta")->check(CLI::PositiveNumber)->capture_default_str();
  grd->add_option("--reps", greedy.reps, "Replicates")->check(CLI::PositiveNumber)->capture_default_str();
  grd->add_option("--seed", greedy.seed, "Random seed")->required();
  grd->add_option("--workers", greedy.common.workers, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*rep) run_reproduce(reproduce);
    else if (*sim) run_simulate(simulate);
    else if (*est) run_estimate(estimate);
    else if (*pst) run_posterior(posterior);
    else if (*bst) run_bias(bias);
    else if (*cal) run_calibrate(calibrate);
    else if (*grd) run_greedy(greedy);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
