#pragma once

#include <cstdint>
#include <vector>

namespace opstat {

// Compensated (Kahan) summation; required for ensemble aggregation at
// 1e4+ terms.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a),
// a > 0, x >= 0. Series expansion below a+1, Lentz continued fraction above.
double regularized_gamma_q(double a, double x);

// Survival function of the chi-squared distribution with dof degrees of
// freedom: P(X > x).
double chi2_sf(double x, int dof);

// Chi-squared uniformity test on event counts (equal expected rate per bin).
struct Chi2Result {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};
Chi2Result chi2_uniformity(const std::vector<std::int64_t>& counts);

// Wald-Wolfowitz runs test for independence of a binary sequence.
// A constant sequence has zero variance; it reports z = 0, p = 1
// (independence cannot be rejected).
struct RunsResult {
  double z = 0.0;
  double p_value = 1.0;
  std::int64_t runs = 0;
};
RunsResult runs_test(const std::vector<std::uint8_t>& labels);

// Least-squares slope/intercept of y against x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Fit of log(y) against log(x); ys must be positive.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace opstat
