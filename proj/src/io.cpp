#include "seqparadox/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "seqparadox/errors.hpp"

namespace seqparadox {

namespace {

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r' && c != '\n'; };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  // from_chars rejects a leading '+'; accept it for hand-edited files.
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw IoError("line " + std::to_string(line_no) + ": not a finite number: '" +
                  std::string(field) + "'");
  }
  return v;
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string trial_data_to_csv(const TrialData& data) {
  data.validate();
  std::string out = "y1,y2,x\n";
  for (std::size_t i = 0; i < data.y1.size(); ++i) {
    out += format_double(data.y1[i]);
    out += ',';
    if (data.y2) out += format_double((*data.y2)[i]);
    out += ',';
    out += std::to_string(data.x);
    out += '\n';
  }
  return out;
}

TrialData trial_data_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  TrialData data;
  std::vector<double> y2;
  std::optional<int> x;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto fields = split_commas(view);
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "y1" || fields[1] != "y2" || fields[2] != "x") {
        throw IoError("trial data: header must be 'y1,y2,x'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) {
      throw IoError("line " + std::to_string(line_no) + ": expected 3 fields");
    }
    data.y1.push_back(parse_double(fields[0], line_no));
    int row_x;
    if (fields[2] == "0") {
      row_x = 0;
    } else if (fields[2] == "1") {
      row_x = 1;
    } else {
      throw IoError("line " + std::to_string(line_no) + ": x must be 0 or 1");
    }
    if (x && *x != row_x) throw IoError("trial data: x differs between rows");
    x = row_x;
    if (row_x == 1) {
      if (fields[1].empty()) throw IoError("line " + std::to_string(line_no) + ": y2 missing");
      y2.push_back(parse_double(fields[1], line_no));
    } else if (!fields[1].empty()) {
      throw IoError("line " + std::to_string(line_no) + ": y2 must be blank when x = 0");
    }
  }
  if (!header_seen) throw IoError("trial data: empty file");
  if (data.y1.empty()) throw IoError("trial data: no rows");
  data.x = *x;
  if (data.x == 1) data.y2 = std::move(y2);
  return data;
}

TrialData read_trial_data(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return trial_data_from_csv(buf.str());
}

std::string replicates_to_csv(std::span<const Replicate> replicates) {
  std::string out = "theta,psi,x,ybar1,ybar,cdf_at_theta\n";
  for (const auto& rep : replicates) {
    const TrialSummary s = summarize(rep.data);
    out += format_double(rep.theta) + ',' + format_double(rep.psi) + ',' + std::to_string(s.x) +
           ',' + format_double(s.ybar1) + ',' + format_double(s.ybar) + ',' +
           format_double(rep.posterior_cdf_at_theta) + '\n';
  }
  return out;
}

nlohmann::json to_json(const PosteriorSummary& s) {
  nlohmann::json q = nlohmann::json::object();
  for (const auto& [p, v] : s.quantiles) q[format_double(p)] = v;
  return {{"mean", s.mean},           {"mode", s.mode},      {"sd", s.sd},
          {"normalizer", s.normalizer}, {"quantiles", q},    {"method", s.method}};
}

nlohmann::json to_json(const BiasReport& r) {
  return {{"theta", r.theta},
          {"psi", r.psi},
          {"marginal_mean", number_or_null(r.marginal_mean)},
          {"cond_mean_stop", number_or_null(r.cond_mean_stop)},
          {"cond_mean_continue", number_or_null(r.cond_mean_continue)},
          {"continuation_prob", r.continuation_prob}};
}

nlohmann::json to_json(const BiasStudy& s) {
  auto column = [](double closed, double mc, double se) {
    nlohmann::json j = {{"closed_form", number_or_null(closed)},
                        {"monte_carlo", number_or_null(mc)},
                        {"mc_se", number_or_null(se)}};
    j["z"] = (std::isfinite(closed) && std::isfinite(mc) && se > 0.0)
                 ? nlohmann::json((mc - closed) / se)
                 : nlohmann::json(nullptr);
    return j;
  };
  nlohmann::json j = to_json(s.closed_form);
  j["n_reps"] = s.n_reps;
  j["n_stop"] = s.n_stop;
  j["n_continue"] = s.n_continue;
  j["comparison"] = {
      {"marginal_mean", column(s.closed_form.marginal_mean, s.mc_marginal_mean, s.se_marginal_mean)},
      {"cond_mean_stop",
       column(s.closed_form.cond_mean_stop, s.mc_cond_mean_stop, s.se_cond_mean_stop)},
      {"cond_mean_continue", column(s.closed_form.cond_mean_continue, s.mc_cond_mean_continue,
                                    s.se_cond_mean_continue)},
      {"continuation_prob", column(s.closed_form.continuation_prob, s.mc_continuation_prob,
                                   s.se_continuation_prob)}};
  return j;
}

nlohmann::json to_json(const UniformityReport& r) {
  return {{"n_used", r.n_used},
          {"ks_statistic", r.ks_statistic},
          {"ks_p_value", r.ks_p_value},
          {"histogram", r.histogram}};
}

nlohmann::json to_json(const SelectionShift& s) {
  return {{"mean_theta_all", number_or_null(s.mean_theta_all)},
          {"mean_theta_continue", number_or_null(s.mean_theta_continue)},
          {"mean_theta_stop", number_or_null(s.mean_theta_stop)},
          {"se_all", number_or_null(s.se_all)},
          {"se_continue", number_or_null(s.se_continue)},
          {"se_stop", number_or_null(s.se_stop)},
          {"n_continue", s.n_continue},
          {"n_stop", s.n_stop},
          {"continue_absent", s.continue_absent},
          {"stop_absent", s.stop_absent}};
}

nlohmann::json to_json(const GreedyDemo& d) {
  return {{"naive", to_json(d.naive)},
          {"full", to_json(d.full)},
          {"mean_retained", d.mean_retained},
          {"mean_p", d.mean_p},
          {"se_retained_minus_p", d.se_retained_minus_p},
          {"n_reps", d.n_reps}};
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed for " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into " + path.string());
  }
}

}  // namespace seqparadox
