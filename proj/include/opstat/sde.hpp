#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "opstat/operator_core.hpp"

namespace opstat {

// Multiplicative-noise linear SDE  dX = -a X dt + sqrt(omega) X dB,
// the scalar reading of the drift-plus-noise equation whose closed-form
// solution is a geometric Brownian motion.
struct SDEConfig {
  double x0 = 1.0;           // initial value, != 0
  double drift_coeff = 1.0;  // a (scalar stand-in for the gradient drift)
  double omega = 1.0;        // diffusion coefficient, >= 0
  double t_end = 1.0;        // > 0
  int n_steps = 256;         // >= 1
  std::uint64_t seed = 0;

  void validate() const;
  double dt() const { return t_end / n_steps; }
};

struct SamplePath {
  std::vector<double> times;                 // uniform grid, n+1 points
  std::vector<double> values;                // n+1
  std::vector<double> brownian_increments;   // n, N(0, dt) draws
};

// Gaussian increments for one path; path_index selects the sub-stream
// (seed, kSdePath | index), so ensembles are reproducible in parallel.
std::vector<double> sample_increments(const SDEConfig& cfg,
                                      std::uint64_t path_index = 0);

// Euler-Maruyama with the factored update X <- X * (1 - a dt + sqrt(omega) dB),
// the same arithmetic the batch kernel performs.
SamplePath euler_maruyama(const SDEConfig& cfg);
SamplePath euler_maruyama(const SDEConfig& cfg,
                          std::vector<double> increments);
// Time-dependent drift variant: drift(t) replaces the constant coefficient.
SamplePath euler_maruyama(const SDEConfig& cfg,
                          const std::function<double(double)>& drift,
                          std::vector<double> increments);

// Ito closed form on the same grid and increments:
//   X(t_k) = x0 exp((-a - omega/2) t_k + sqrt(omega) B(t_k)).
SamplePath gbm_exact(const SDEConfig& cfg, const std::vector<double>& increments);

// Terminal Euler-Maruyama values for a block of paths (kernel-backed).
// Path p uses sub-stream p; with antithetic=true odd paths negate the
// increments of their even partner.
std::vector<double> em_terminal_batch(const SDEConfig& cfg, int n_paths,
                                      bool antithetic = false);

struct ConvergenceRow {
  double dt;
  double strong_error;  // mean |X_em(T) - X_exact(T)| over paths
  double weak_error;    // |mean(X_em(T) - X_exact(T))|
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  double strong_order = 0.0;  // log-log least-squares slope
  double weak_order = 0.0;
  int paths = 0;
};

// Integrator-versus-oracle study across nested grids; coarse increments are
// block sums of the shared finest increments. Antithetic pairing halves the
// Monte Carlo noise of the weak-error estimate.
ConvergenceStudy convergence_study(const SDEConfig& cfg,
                                   const std::vector<int>& step_counts,
                                   int paths, bool antithetic = true);

struct EnsembleStats {
  int paths = 0;
  double mean = 0.0;         // sample mean of X_exact(T)
  double mean_se = 0.0;
  double mean_sq = 0.0;      // sample mean of X_exact(T)^2
  double mean_sq_se = 0.0;
  double expected_mean = 0.0;     // x0 e^{-a T}
  double expected_mean_sq = 0.0;  // x0^2 e^{(-2a + omega) T}
  double z_mean = 0.0;            // standardized deviations
  double z_mean_sq = 0.0;
};

// Moment check of the exact solution over independent paths (compensated
// summation; kernel-backed terminal evaluation).
EnsembleStats gbm_ensemble_stats(const SDEConfig& cfg, int paths);

// Square root of a positive semidefinite operator via the spectral calculus;
// eigenvalues in [-1e-10, 0) are clamped, lower ones raise DomainError.
HermitianOperator sqrt_operator(const HermitianOperator& h);

// exp(-sqrt(omega) t H^{1/2}): the contraction semigroup generated by
// -sqrt(omega) H^{1/2}.
ComplexMatrix diffusion_semigroup(const HermitianOperator& h, double omega,
                                  double t);

}  // namespace opstat
