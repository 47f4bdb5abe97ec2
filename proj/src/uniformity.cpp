#include "seqparadox/uniformity.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "seqparadox/errors.hpp"

namespace seqparadox {

namespace {

using Matrix = std::vector<double>;  // row-major m x m

void multiply(const Matrix& a, const Matrix& b, Matrix& out, std::size_t m) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      const double aik = a[i * m + k];
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) out[i * m + j] += aik * b[k * m + j];
    }
  }
}

// result = a^n with a decimal exponent tracked in `exponent` to avoid overflow.
void matrix_power(const Matrix& a, int a_exp, Matrix& result, int& exponent, std::size_t m,
                  std::size_t n) {
  if (n == 1) {
    result = a;
    exponent = a_exp;
    return;
  }
  matrix_power(a, a_exp, result, exponent, m, n / 2);
  Matrix tmp(m * m);
  multiply(result, result, tmp, m);
  int e = 2 * exponent;
  if (n % 2 == 0) {
    result = tmp;
  } else {
    multiply(a, tmp, result, m);
    e += a_exp;
  }
  if (result[(m / 2) * m + m / 2] > 1e140) {
    for (double& v : result) v *= 1e-140;
    e += 140;
  }
  exponent = e;
}

}  // namespace

double kolmogorov_cdf(std::size_t n, double d) {
  if (n == 0) throw DomainError("kolmogorov_cdf: n must be positive");
  if (d <= 0.0) return 0.0;
  if (d >= 1.0) return 1.0;
  const double nd = static_cast<double>(n);
  // Far right tail: the asymptotic form is accurate to ~5 digits and avoids a
  // large matrix power. Only reached for p-values below about 1e-3.
  const double s = d * d * nd;
  if (s > 7.24 || (s > 3.76 && n > 99)) {
    return 1.0 - 2.0 * std::exp(-(2.000071 + 0.331 / std::sqrt(nd) + 1.409 / nd) * s);
  }
  const auto k = static_cast<std::size_t>(nd * d) + 1;
  const std::size_t m = 2 * k - 1;
  const double h = static_cast<double>(k) - nd * d;
  Matrix hm(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) hm[i * m + j] = (i + 1 >= j) ? 1.0 : 0.0;
  }
  for (std::size_t i = 0; i < m; ++i) {
    hm[i * m] -= std::pow(h, static_cast<double>(i + 1));
    hm[(m - 1) * m + i] -= std::pow(h, static_cast<double>(m - i));
  }
  if (2.0 * h - 1.0 > 0.0) hm[(m - 1) * m] += std::pow(2.0 * h - 1.0, static_cast<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i + 1 > j) {
        for (std::size_t g = 1; g <= i + 1 - j; ++g) hm[i * m + j] /= static_cast<double>(g);
      }
    }
  }
  Matrix q;
  int exponent = 0;
  matrix_power(hm, 0, q, exponent, m, n);
  double value = q[(k - 1) * m + (k - 1)];
  for (std::size_t i = 1; i <= n; ++i) {
    value = value * static_cast<double>(i) / nd;
    if (value < 1e-140) {
      value *= 1e140;
      exponent -= 140;
    }
  }
  return std::clamp(value * std::pow(10.0, exponent), 0.0, 1.0);
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;  // series converges slowly; the value is 1 to double precision
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-18) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

UniformityReport uniformity_report(std::span<const double> values) {
  UniformityReport report;
  report.n_used = values.size();
  if (values.empty()) return report;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double u = std::clamp(sorted[i], 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - u, u - static_cast<double>(i) / n});
    auto bin = static_cast<std::size_t>(u * static_cast<double>(kHistogramBins));
    ++report.histogram[std::min(bin, kHistogramBins - 1)];
  }
  report.ks_statistic = d;
  report.ks_p_value = std::clamp(1.0 - kolmogorov_cdf(sorted.size(), d), 0.0, 1.0);
  return report;
}

TwoSampleKs two_sample_ks(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("two_sample_ks: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  const double ne = std::sqrt(nx * ny / (nx + ny));
  return TwoSampleKs{d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d)};
}

}  // namespace seqparadox
