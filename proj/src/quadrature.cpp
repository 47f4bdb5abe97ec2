#include "seqparadox/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "seqparadox/errors.hpp"

namespace seqparadox {

namespace {

// Kronrod abscissae on [0, 1]; odd indices are shared with the 7-point Gauss rule.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

double checked(const std::function<double(double)>& f, double x) {
  const double y = f(x);
  if (!std::isfinite(y)) {
    throw DomainError("integrate: integrand is not finite at x = " + std::to_string(x));
  }
  return y;
}

Panel gauss_kronrod(const std::function<double(double)>& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = checked(f, center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double sum = checked(f, center - dx) + checked(f, center + dx);
    kronrod += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  return Panel{lo, hi, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           double tol, std::size_t max_evaluations) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw DomainError("integrate: requires finite lo < hi");
  }
  if (!(tol > 0.0)) throw DomainError("integrate: tolerance must be positive");

  constexpr std::size_t kPerPanel = 15;
  std::priority_queue<Panel> panels;
  panels.push(gauss_kronrod(f, lo, hi));
  std::size_t evaluations = kPerPanel;
  double value = panels.top().value;
  double error = panels.top().error;

  while (error > tol) {
    if (evaluations + 2 * kPerPanel > max_evaluations) {
      throw AccuracyError("integrate: evaluation budget exhausted (error estimate " +
                              std::to_string(error) + ")",
                          value);
    }
    const Panel worst = panels.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(worst.lo < mid && mid < worst.hi)) {
      throw AccuracyError("integrate: interval cannot be subdivided further", value);
    }
    panels.pop();
    const Panel left = gauss_kronrod(f, worst.lo, mid);
    const Panel right = gauss_kronrod(f, mid, worst.hi);
    evaluations += 2 * kPerPanel;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);

    // Incremental sums drift; recompute once the target looks met.
    if (error <= tol) {
      std::vector<Panel> all;
      all.reserve(panels.size());
      value = 0.0;
      error = 0.0;
      while (!panels.empty()) {
        all.push_back(panels.top());
        panels.pop();
      }
      for (auto it = all.rbegin(); it != all.rend(); ++it) {
        value += it->value;
        error += it->error;
      }
      for (const Panel& p : all) panels.push(p);
    }
  }
  return QuadratureResult{value, error, evaluations};
}

}  // namespace seqparadox
