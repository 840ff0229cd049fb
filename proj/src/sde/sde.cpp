#include "opstat/sde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "opstat/errors.hpp"
#include "opstat/kernels.hpp"
#include "opstat/parallel.hpp"
#include "opstat/rng.hpp"
#include "opstat/stats.hpp"
#include "opstat/tolerances.hpp"

namespace opstat {

void SDEConfig::validate() const {
  if (x0 == 0.0) throw ValidationError("x0 must be nonzero");
  if (!(t_end > 0.0)) throw ValidationError("t_end must be > 0");
  if (!(omega >= 0.0)) throw ValidationError("omega must be >= 0");
  if (n_steps < 1) throw ValidationError("n_steps must be >= 1");
  if (!std::isfinite(x0) || !std::isfinite(drift_coeff) || !std::isfinite(omega) ||
      !std::isfinite(t_end))
    throw ValidationError("SDE parameters must be finite");
}

std::vector<double> sample_increments(const SDEConfig& cfg,
                                      std::uint64_t path_index) {
  cfg.validate();
  Philox gen(cfg.seed, stream_id(Stream::kSdePath, path_index));
  const double sd = std::sqrt(cfg.dt());
  std::vector<double> inc(static_cast<std::size_t>(cfg.n_steps));
  for (auto& d : inc) d = sd * gen.next_normal();
  return inc;
}

namespace {

SamplePath make_grid(const SDEConfig& cfg) {
  SamplePath path;
  const double dt = cfg.dt();
  path.times.resize(static_cast<std::size_t>(cfg.n_steps) + 1);
  for (int k = 0; k <= cfg.n_steps; ++k) path.times[k] = k * dt;
  path.times.back() = cfg.t_end;
  path.values.resize(path.times.size());
  return path;
}

}  // namespace

SamplePath euler_maruyama(const SDEConfig& cfg) {
  return euler_maruyama(cfg, sample_increments(cfg));
}

SamplePath euler_maruyama(const SDEConfig& cfg, std::vector<double> increments) {
  cfg.validate();
  if (increments.size() != static_cast<std::size_t>(cfg.n_steps))
    throw ValidationError("increment count does not match n_steps");
  SamplePath path = make_grid(cfg);
  const double decay = 1.0 - cfg.drift_coeff * cfg.dt();
  const double sigma = std::sqrt(cfg.omega);
  double x = cfg.x0;
  path.values[0] = x;
  for (int k = 0; k < cfg.n_steps; ++k) {
    x = x * (decay + sigma * increments[k]);
    path.values[k + 1] = x;
  }
  path.brownian_increments = std::move(increments);
  return path;
}

SamplePath euler_maruyama(const SDEConfig& cfg,
                          const std::function<double(double)>& drift,
                          std::vector<double> increments) {
  cfg.validate();
  if (!drift) throw ValidationError("drift callback is empty");
  if (increments.size() != static_cast<std::size_t>(cfg.n_steps))
    throw ValidationError("increment count does not match n_steps");
  SamplePath path = make_grid(cfg);
  const double dt = cfg.dt();
  const double sigma = std::sqrt(cfg.omega);
  double x = cfg.x0;
  path.values[0] = x;
  for (int k = 0; k < cfg.n_steps; ++k) {
    x = x * (1.0 - drift(path.times[k]) * dt + sigma * increments[k]);
    path.values[k + 1] = x;
  }
  path.brownian_increments = std::move(increments);
  return path;
}

SamplePath gbm_exact(const SDEConfig& cfg, const std::vector<double>& increments) {
  cfg.validate();
  if (increments.size() != static_cast<std::size_t>(cfg.n_steps))
    throw ValidationError("increment count does not match n_steps");
  SamplePath path = make_grid(cfg);
  const double drift_rate = -cfg.drift_coeff - 0.5 * cfg.omega;
  const double sigma = std::sqrt(cfg.omega);
  double b = 0.0;
  path.values[0] = cfg.x0;
  for (int k = 0; k < cfg.n_steps; ++k) {
    b += increments[k];
    path.values[k + 1] = cfg.x0 * std::exp(drift_rate * path.times[k + 1] + sigma * b);
  }
  path.brownian_increments = increments;
  return path;
}

namespace {

constexpr int kBlock = 256;

// Fill `slab` (step-major, kBlock wide) with increments for paths
// [first, first+count) and return each path's total B(T) in `btotal`.
void fill_block(const SDEConfig& cfg, std::uint64_t first, int count,
                bool antithetic, std::vector<double>& slab,
                std::vector<double>& btotal) {
  const int n = cfg.n_steps;
  std::vector<double> row(static_cast<std::size_t>(n));
  for (int p = 0; p < count; ++p) {
    const std::uint64_t global = first + p;
    const std::uint64_t source = antithetic ? (global / 2) * 2 : global;
    Philox gen(cfg.seed, stream_id(Stream::kSdePath, source));
    const double sd = std::sqrt(cfg.dt());
    const double flip = (antithetic && (global & 1)) ? -1.0 : 1.0;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      row[k] = flip * (sd * gen.next_normal());
      sum += row[k];
    }
    btotal[p] = sum;
    for (int k = 0; k < n; ++k) slab[static_cast<std::size_t>(k) * kBlock + p] = row[k];
  }
}

}  // namespace

std::vector<double> em_terminal_batch(const SDEConfig& cfg, int n_paths,
                                      bool antithetic) {
  cfg.validate();
  if (n_paths < 1) throw ValidationError("need >= 1 path");
  std::vector<double> terminal(static_cast<std::size_t>(n_paths));
  const double decay = 1.0 - cfg.drift_coeff * cfg.dt();
  const double sigma = std::sqrt(cfg.omega);
  const int blocks = (n_paths + kBlock - 1) / kBlock;

  parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t blk) {
    const std::uint64_t first = static_cast<std::uint64_t>(blk) * kBlock;
    const int count = std::min<int>(kBlock, n_paths - static_cast<int>(first));
    std::vector<double> slab(static_cast<std::size_t>(cfg.n_steps) * kBlock, 0.0);
    std::vector<double> btotal(kBlock, 0.0);
    fill_block(cfg, first, count, antithetic, slab, btotal);
    std::vector<double> x(kBlock, cfg.x0);
    for (int k = 0; k < cfg.n_steps; ++k)
      kern::ops().em_step(x.data(), slab.data() + static_cast<std::size_t>(k) * kBlock,
                          kBlock, decay, sigma);
    for (int p = 0; p < count; ++p) terminal[first + p] = x[p];
  });
  return terminal;
}

ConvergenceStudy convergence_study(const SDEConfig& cfg,
                                   const std::vector<int>& step_counts,
                                   int paths, bool antithetic) {
  cfg.validate();
  if (step_counts.size() < 2)
    throw ValidationError("convergence study needs >= 2 grid levels");
  for (std::size_t l = 1; l < step_counts.size(); ++l)
    if (step_counts[l] <= step_counts[l - 1])
      throw ValidationError("step counts must increase");
  const int finest = step_counts.back();
  for (const int n : step_counts) {
    if (n < 1) throw ValidationError("step counts must be >= 1");
    if (finest % n != 0)
      throw ValidationError("every coarse grid must divide the finest");
  }
  if (paths < 2) throw ValidationError("need >= 2 paths");

  SDEConfig fine = cfg;
  fine.n_steps = finest;
  const double sigma = std::sqrt(cfg.omega);
  const std::size_t levels = step_counts.size();

  // per path and level: signed difference EM - exact at t_end
  std::vector<std::vector<double>> diffs(
      levels, std::vector<double>(static_cast<std::size_t>(paths)));

  parallel_for(static_cast<std::size_t>(paths), [&](std::size_t p) {
    const std::uint64_t source = antithetic ? (p / 2) * 2 : p;
    std::vector<double> inc = sample_increments(fine, source);
    if (antithetic && (p & 1))
      for (auto& d : inc) d = -d;

    double btotal = 0.0;
    for (const double d : inc) btotal += d;
    const double exact =
        cfg.x0 * std::exp((-cfg.drift_coeff - 0.5 * cfg.omega) * cfg.t_end +
                          sigma * btotal);

    for (std::size_t l = 0; l < levels; ++l) {
      const int n = step_counts[l];
      const int stride = finest / n;
      const double dt = cfg.t_end / n;
      const double decay = 1.0 - cfg.drift_coeff * dt;
      double x = cfg.x0;
      for (int k = 0; k < n; ++k) {
        double db = 0.0;
        for (int j = 0; j < stride; ++j) db += inc[static_cast<std::size_t>(k) * stride + j];
        x = x * (decay + sigma * db);
      }
      diffs[l][p] = x - exact;
    }
  });

  ConvergenceStudy study;
  study.paths = paths;
  std::vector<double> dts, strongs, weaks;
  for (std::size_t l = 0; l < levels; ++l) {
    KahanSum abs_sum, signed_sum;
    for (const double d : diffs[l]) {
      abs_sum.add(std::fabs(d));
      signed_sum.add(d);
    }
    ConvergenceRow row;
    row.dt = cfg.t_end / step_counts[l];
    row.strong_error = abs_sum.value() / paths;
    row.weak_error = std::fabs(signed_sum.value() / paths);
    study.rows.push_back(row);
    dts.push_back(row.dt);
    strongs.push_back(row.strong_error);
    weaks.push_back(std::max(row.weak_error, 1e-300));
  }
  study.strong_order = fit_loglog(dts, strongs).slope;
  study.weak_order = fit_loglog(dts, weaks).slope;
  return study;
}

EnsembleStats gbm_ensemble_stats(const SDEConfig& cfg, int paths) {
  cfg.validate();
  if (paths < 2) throw ValidationError("need >= 2 paths");

  // B(T) per path, then the closed form through the kernel lane.
  std::vector<double> btotal(static_cast<std::size_t>(paths));
  parallel_for(static_cast<std::size_t>(paths), [&](std::size_t p) {
    Philox gen(cfg.seed, stream_id(Stream::kSdePath, p));
    const double sd = std::sqrt(cfg.dt());
    double sum = 0.0;
    for (int k = 0; k < cfg.n_steps; ++k) sum += sd * gen.next_normal();
    btotal[p] = sum;
  });

  std::vector<double> terminal(btotal.size());
  kern::ops().gbm_terminal(btotal.data(), terminal.data(),
                           static_cast<int>(btotal.size()), cfg.x0,
                           (-cfg.drift_coeff - 0.5 * cfg.omega) * cfg.t_end,
                           std::sqrt(cfg.omega));

  KahanSum s1, s2;
  for (const double x : terminal) {
    s1.add(x);
    s2.add(x * x);
  }
  EnsembleStats st;
  st.paths = paths;
  st.mean = s1.value() / paths;
  st.mean_sq = s2.value() / paths;

  KahanSum v1, v2;
  for (const double x : terminal) {
    const double d1 = x - st.mean;
    const double d2 = x * x - st.mean_sq;
    v1.add(d1 * d1);
    v2.add(d2 * d2);
  }
  st.mean_se = std::sqrt(v1.value() / (paths - 1.0) / paths);
  st.mean_sq_se = std::sqrt(v2.value() / (paths - 1.0) / paths);

  st.expected_mean = cfg.x0 * std::exp(-cfg.drift_coeff * cfg.t_end);
  st.expected_mean_sq =
      cfg.x0 * cfg.x0 *
      std::exp((-2.0 * cfg.drift_coeff + cfg.omega) * cfg.t_end);
  st.z_mean = (st.mean - st.expected_mean) / st.mean_se;
  st.z_mean_sq = (st.mean_sq - st.expected_mean_sq) / st.mean_sq_se;
  return st;
}

HermitianOperator sqrt_operator(const HermitianOperator& h) {
  const SpectralDecomposition s = eig_hermitian(h);
  for (const auto& ev : s.eigenvalues) {
    if (ev.real() < -tol::kPsdEigen) {
      std::ostringstream msg;
      msg << "operator is not positive semidefinite (eigenvalue " << ev.real()
          << ")";
      throw DomainError(msg.str());
    }
  }
  const ComplexMatrix root = matrix_function(s, [](cplx lambda) {
    const double v = lambda.real();
    return cplx{std::sqrt(v < 0.0 ? 0.0 : v), 0.0};
  });
  return HermitianOperator((root + root.adjoint()) * cplx{0.5, 0.0});
}

ComplexMatrix diffusion_semigroup(const HermitianOperator& h, double omega,
                                  double t) {
  if (!(omega >= 0.0)) throw ValidationError("omega must be >= 0");
  if (!(t >= 0.0)) throw ValidationError("time must be >= 0");
  const SpectralDecomposition s = eig_hermitian(h);
  for (const auto& ev : s.eigenvalues) {
    if (ev.real() < -tol::kPsdEigen) {
      std::ostringstream msg;
      msg << "operator is not positive semidefinite (eigenvalue " << ev.real()
          << ")";
      throw DomainError(msg.str());
    }
  }
  const double rate = std::sqrt(omega) * t;
  return matrix_function(s, [rate](cplx lambda) {
    const double v = lambda.real();
    return cplx{std::exp(-rate * std::sqrt(v < 0.0 ? 0.0 : v)), 0.0};
  });
}

}  // namespace opstat
