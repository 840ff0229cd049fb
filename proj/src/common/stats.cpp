#include "opstat/stats.hpp"

#include <cmath>
#include <limits>

#include "opstat/errors.hpp"

namespace opstat {
namespace {

// Lower regularized gamma P(a, x) by power series (x < a + 1).
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized gamma Q(a, x) by modified Lentz continued fraction
// (x >= a + 1).
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0)) throw ValidationError("gamma_q requires a > 0");
  if (x < 0.0) throw ValidationError("gamma_q requires x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi2_sf(double x, int dof) {
  if (dof < 1) throw ValidationError("chi2_sf requires dof >= 1");
  if (x <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * dof, 0.5 * x);
}

Chi2Result chi2_uniformity(const std::vector<std::int64_t>& counts) {
  if (counts.size() < 2)
    throw ValidationError("chi2 uniformity test needs at least 2 bins");
  double total = 0.0;
  for (const auto c : counts) {
    if (c < 0) throw ValidationError("negative event count");
    total += static_cast<double>(c);
  }
  Chi2Result r;
  r.dof = static_cast<int>(counts.size()) - 1;
  if (total == 0.0) {
    r.p_value = 1.0;
    return r;
  }
  const double expected = total / static_cast<double>(counts.size());
  double stat = 0.0;
  for (const auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  r.statistic = stat;
  r.p_value = chi2_sf(stat, r.dof);
  return r;
}

RunsResult runs_test(const std::vector<std::uint8_t>& labels) {
  RunsResult r;
  const std::size_t n = labels.size();
  if (n < 2) return r;
  std::int64_t n1 = 0;
  for (const auto v : labels) n1 += (v != 0);
  const std::int64_t n0 = static_cast<std::int64_t>(n) - n1;
  std::int64_t runs = 1;
  for (std::size_t i = 1; i < n; ++i)
    if ((labels[i] != 0) != (labels[i - 1] != 0)) ++runs;
  r.runs = runs;
  if (n0 == 0 || n1 == 0) return r;  // constant sequence, sigma = 0
  const double dn = static_cast<double>(n);
  const double mu = 2.0 * n0 * n1 / dn + 1.0;
  const double var = (mu - 1.0) * (mu - 2.0) / (dn - 1.0);
  if (var <= 0.0) return r;
  r.z = (static_cast<double>(runs) - mu) / std::sqrt(var);
  r.p_value = std::erfc(std::fabs(r.z) / std::sqrt(2.0));
  return r;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ValidationError("line fit needs >= 2 points of equal length");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw ValidationError("degenerate abscissae in line fit");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw ValidationError("log-log fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

}  // namespace opstat
