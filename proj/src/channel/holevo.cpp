#include "opstat/holevo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "opstat/errors.hpp"
#include "opstat/operator_core.hpp"
#include "opstat/parallel.hpp"
#include "opstat/rng.hpp"

namespace opstat {
namespace {

constexpr double kAcceptGain = 1e-14;  // minimum chi gain to accept a step
constexpr double kLogFloor = 1e-18;    // eigenvalue clamp inside log2
constexpr double kDeadProb = 1e-12;    // states below this weight are parked

struct EigH {
  std::vector<double> vals;
  ComplexMatrix vecs;
};

EigH eigh_raw(const ComplexMatrix& m) {
  const ComplexMatrix sym = (m + m.adjoint()) * cplx{0.5, 0.0};
  SpectralDecomposition s = eig_hermitian(HermitianOperator(sym));
  EigH out{s.real_eigenvalues(), std::move(s.eigenvectors)};
  return out;
}

double entropy_bits(const EigH& e) {
  double bits = 0.0;
  for (double lambda : e.vals)
    if (lambda > 0.0) bits -= lambda * std::log2(lambda);
  return bits < 0.0 ? 0.0 : bits;
}

ComplexMatrix log2_clamped(const EigH& e) {
  const int n = e.vecs.rows();
  ComplexMatrix scaled = e.vecs;
  for (int j = 0; j < n; ++j) {
    const double lg = std::log2(std::max(e.vals[j], kLogFloor));
    for (int i = 0; i < n; ++i) scaled(i, j) *= lg;
  }
  return scaled * e.vecs.adjoint();
}

// tr[rho log2 sigma] given sigma's eigendecomposition.
double trace_log_cross(const ComplexMatrix& rho, const EigH& sigma) {
  const int n = rho.rows();
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    // <w_k | rho | w_k>
    cplx q = 0.0;
    for (int i = 0; i < n; ++i) {
      cplx row = 0.0;
      for (int j = 0; j < n; ++j) row += rho(i, j) * sigma.vecs(j, k);
      q += std::conj(sigma.vecs(i, k)) * row;
    }
    acc += q.real() * std::log2(std::max(sigma.vals[k], kLogFloor));
  }
  return acc;
}

// D(rho || sigma) in bits.
double rel_entropy(const ComplexMatrix& rho, const EigH& rho_eig,
                   const EigH& sigma_eig) {
  double tr_rho_log_rho = 0.0;
  for (double lambda : rho_eig.vals)
    if (lambda > 0.0) tr_rho_log_rho += lambda * std::log2(lambda);
  return tr_rho_log_rho - trace_log_cross(rho, sigma_eig);
}

ComplexMatrix outer(const std::vector<cplx>& psi) {
  const int n = static_cast<int>(psi.size());
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = psi[i] * std::conj(psi[j]);
  return m;
}

ComplexMatrix apply_raw(const QuantumChannel& ch, const ComplexMatrix& sigma) {
  ComplexMatrix out = ComplexMatrix::zero(ch.dim_out());
  for (const auto& k : ch.kraus()) out += (k * sigma) * k.adjoint();
  return out;
}

// Heisenberg-picture (adjoint) action: sum K^dagger X K.
ComplexMatrix apply_adjoint_raw(const QuantumChannel& ch,
                                const ComplexMatrix& x) {
  ComplexMatrix out = ComplexMatrix::zero(ch.dim_in());
  for (const auto& k : ch.kraus()) out += (k.adjoint() * x) * k;
  return out;
}

void normalize(std::vector<cplx>& psi) {
  const double n = vec_norm(psi);
  if (n == 0.0) throw NumericError("optimizer produced a zero state");
  for (auto& z : psi) z /= n;
}

std::vector<cplx> random_state(int dim, Philox& gen) {
  std::vector<cplx> psi(dim);
  for (auto& z : psi) z = cplx{gen.next_normal(), gen.next_normal()};
  normalize(psi);
  return psi;
}

struct Ascent {
  double chi = 0.0;
  std::vector<double> p;
  std::vector<std::vector<cplx>> psi;
  int iterations = 0;
  bool converged = false;
};

// One restart of the capacity ascent from the given initial ensemble.
Ascent run_ascent(const QuantumChannel& ch, PureEnsemble init, int max_iters) {
  const std::size_t m = init.states.size();
  Ascent a;
  a.p = std::move(init.probs);
  a.psi = std::move(init.states);

  std::vector<ComplexMatrix> outs;
  outs.reserve(m);
  std::vector<EigH> out_eigs(m);
  std::vector<double> out_entropy(m);
  for (std::size_t i = 0; i < m; ++i) {
    outs.push_back(apply_raw(ch, outer(a.psi[i])));
    out_eigs[i] = eigh_raw(outs[i]);
    out_entropy[i] = entropy_bits(out_eigs[i]);
  }
  auto average = [&] {
    ComplexMatrix avg = ComplexMatrix::zero(ch.dim_out());
    for (std::size_t i = 0; i < m; ++i) avg += outs[i] * cplx{a.p[i], 0.0};
    return avg;
  };
  ComplexMatrix avg = average();
  EigH avg_eig = eigh_raw(avg);
  auto chi_now = [&] {
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += a.p[i] * out_entropy[i];
    return entropy_bits(avg_eig) - mean;
  };
  a.chi = chi_now();

  auto prob_update = [&] {
    std::vector<double> d(m, 0.0);
    double dmax = -1e300;
    for (std::size_t i = 0; i < m; ++i) {
      if (a.p[i] <= 0.0) continue;
      d[i] = rel_entropy(outs[i], out_eigs[i], avg_eig);
      dmax = std::max(dmax, d[i]);
    }
    double z = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      a.p[i] = a.p[i] > 0.0 ? a.p[i] * std::exp2(d[i] - dmax) : 0.0;
      z += a.p[i];
    }
    for (auto& q : a.p) q /= z;
    avg = average();
    avg_eig = eigh_raw(avg);
    a.chi = chi_now();
  };

  int it = 0;
  for (; it < max_iters; ++it) {
    prob_update();

    bool improved = false;
    const ComplexMatrix log_avg = log2_clamped(avg_eig);
    for (std::size_t i = 0; i < m; ++i) {
      if (a.p[i] < kDeadProb) continue;
      const ComplexMatrix grad =
          apply_adjoint_raw(ch, log2_clamped(out_eigs[i]) - log_avg);
      const EigH ge = eigh_raw(grad);
      std::vector<cplx> cand = [&] {
        std::vector<cplx> v(grad.rows());
        const int top = grad.rows() - 1;
        for (int r = 0; r < grad.rows(); ++r) v[r] = ge.vecs(r, top);
        return v;
      }();
      // Phase-align the candidate so interpolation stays inside the state.
      cplx overlap = vdot(a.psi[i], cand);
      if (std::abs(overlap) > 0.0) {
        const cplx phase = std::conj(overlap) / std::abs(overlap);
        for (auto& z : cand) z *= phase;
      }

      double eta = 1.0;
      for (int bt = 0; bt < 12; ++bt, eta *= 0.5) {
        std::vector<cplx> trial(a.psi[i].size());
        for (std::size_t r = 0; r < trial.size(); ++r)
          trial[r] = (1.0 - eta) * a.psi[i][r] + eta * cand[r];
        const double tn = vec_norm(trial);
        if (tn < 1e-12) continue;
        for (auto& z : trial) z /= tn;

        ComplexMatrix out_trial = apply_raw(ch, outer(trial));
        ComplexMatrix avg_trial = avg + (out_trial - outs[i]) * cplx{a.p[i], 0.0};
        EigH avg_trial_eig = eigh_raw(avg_trial);
        EigH out_trial_eig = eigh_raw(out_trial);
        const double s_trial = entropy_bits(out_trial_eig);
        double mean = 0.0;
        for (std::size_t r = 0; r < m; ++r)
          mean += a.p[r] * (r == i ? s_trial : out_entropy[r]);
        const double chi_trial = entropy_bits(avg_trial_eig) - mean;
        if (chi_trial > a.chi + kAcceptGain) {
          a.psi[i] = std::move(trial);
          outs[i] = std::move(out_trial);
          out_eigs[i] = std::move(out_trial_eig);
          out_entropy[i] = s_trial;
          avg = std::move(avg_trial);
          avg_eig = std::move(avg_trial_eig);
          a.chi = chi_trial;
          improved = true;
          break;
        }
      }
    }

    if (!improved && it >= 4) {
      // states are stationary; polish the probabilities to fixed point
      for (int round = 0; round < 50; ++round) {
        const double before = a.chi;
        prob_update();
        if (std::fabs(a.chi - before) < 1e-13) break;
      }
      a.converged = true;
      ++it;
      break;
    }
  }
  a.iterations = it;
  return a;
}

PureEnsemble basis_init(int dim, int m, Philox& gen) {
  PureEnsemble e;
  e.probs.assign(m, 1.0 / m);
  for (int i = 0; i < m; ++i) {
    if (i < dim) {
      std::vector<cplx> basis(dim, cplx{0.0, 0.0});
      basis[i] = 1.0;
      e.states.push_back(std::move(basis));
    } else {
      e.states.push_back(random_state(dim, gen));
    }
  }
  return e;
}

PureEnsemble random_init(int dim, int m, Philox& gen) {
  PureEnsemble e;
  e.probs.assign(m, 1.0 / m);
  for (int i = 0; i < m; ++i) e.states.push_back(random_state(dim, gen));
  return e;
}

void validate_opt(const OptimizerConfig& opt) {
  if (opt.ensemble_size < 0) throw ValidationError("ensemble_size must be >= 0");
  if (opt.restarts < 1) throw ValidationError("restarts must be >= 1");
  if (opt.max_iters < 1) throw ValidationError("max_iters must be >= 1");
  if (!(opt.tolerance > 0.0)) throw ValidationError("tolerance must be > 0");
}

}  // namespace

Ensemble CapacityResult::to_ensemble() const {
  std::vector<DensityMatrix> states;
  states.reserve(argmax.states.size());
  for (const auto& psi : argmax.states) states.push_back(DensityMatrix::pure(psi));
  std::vector<double> probs = argmax.probs;
  double sum = 0.0;
  for (auto& q : probs) {
    if (q < 0.0) q = 0.0;
    sum += q;
  }
  for (auto& q : probs) q /= sum;
  return Ensemble(std::move(probs), std::move(states));
}

CapacityResult holevo_capacity(const QuantumChannel& ch,
                               const OptimizerConfig& opt) {
  return holevo_capacity(ch, opt, {});
}

CapacityResult holevo_capacity(const QuantumChannel& ch,
                               const OptimizerConfig& opt,
                               const std::vector<PureEnsemble>& extra_inits) {
  validate_opt(opt);
  const int dim = ch.dim_in();
  const int m = opt.ensemble_size > 0 ? opt.ensemble_size : dim * dim;

  std::vector<PureEnsemble> inits;
  {
    Philox gen(opt.seed, stream_id(Stream::kOptimizerRestart, 0));
    inits.push_back(basis_init(dim, m, gen));
  }
  for (const auto& e : extra_inits) {
    if (e.probs.size() != e.states.size() || e.probs.empty())
      throw ValidationError("malformed optimizer init ensemble");
    inits.push_back(e);
  }
  for (int r = static_cast<int>(inits.size()); r < opt.restarts; ++r) {
    Philox gen(opt.seed, stream_id(Stream::kOptimizerRestart,
                                   static_cast<std::uint64_t>(r)));
    inits.push_back(random_init(dim, m, gen));
  }

  std::vector<Ascent> results(inits.size());
  parallel_for(inits.size(), [&](std::size_t r) {
    results[r] = run_ascent(ch, inits[r], opt.max_iters);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r)
    if (results[r].chi > results[best].chi) best = r;

  CapacityResult out;
  out.bits = std::max(0.0, results[best].chi);
  out.converged = results[best].converged;
  out.iterations = results[best].iterations;
  out.argmax.probs = std::move(results[best].p);
  out.argmax.states = std::move(results[best].psi);
  return out;
}

MinEntropyResult min_output_entropy(const QuantumChannel& ch,
                                    const OptimizerConfig& opt) {
  validate_opt(opt);
  const int dim = ch.dim_in();
  const int restarts = std::max(opt.restarts, dim);

  struct Descent {
    double bits = 0.0;
    bool converged = false;
    std::vector<cplx> psi;
  };
  std::vector<Descent> results(restarts);

  parallel_for(static_cast<std::size_t>(restarts), [&](std::size_t r) {
    Philox gen(opt.seed, stream_id(Stream::kOptimizerRestart, r));
    std::vector<cplx> psi;
    if (static_cast<int>(r) < dim) {
      psi.assign(dim, cplx{0.0, 0.0});
      psi[r] = 1.0;
    } else {
      psi = random_state(dim, gen);
    }

    ComplexMatrix out = apply_raw(ch, outer(psi));
    EigH out_eig = eigh_raw(out);
    double s = entropy_bits(out_eig);
    bool converged = false;
    int it = 0;
    for (; it < opt.max_iters; ++it) {
      const ComplexMatrix grad = apply_adjoint_raw(ch, log2_clamped(out_eig));
      const EigH ge = eigh_raw(grad);
      std::vector<cplx> cand(dim);
      for (int i = 0; i < dim; ++i) cand[i] = ge.vecs(i, dim - 1);
      cplx overlap = vdot(psi, cand);
      if (std::abs(overlap) > 0.0) {
        const cplx phase = std::conj(overlap) / std::abs(overlap);
        for (auto& z : cand) z *= phase;
      }

      bool improved = false;
      double eta = 1.0;
      for (int bt = 0; bt < 12; ++bt, eta *= 0.5) {
        std::vector<cplx> trial(dim);
        for (int i = 0; i < dim; ++i)
          trial[i] = (1.0 - eta) * psi[i] + eta * cand[i];
        const double tn = vec_norm(trial);
        if (tn < 1e-12) continue;
        for (auto& z : trial) z /= tn;
        ComplexMatrix out_trial = apply_raw(ch, outer(trial));
        EigH out_trial_eig = eigh_raw(out_trial);
        const double s_trial = entropy_bits(out_trial_eig);
        if (s_trial < s - kAcceptGain) {
          psi = std::move(trial);
          out_eig = std::move(out_trial_eig);
          s = s_trial;
          improved = true;
          break;
        }
      }
      if (!improved) {
        converged = true;
        break;
      }
    }
    results[r] = {s, converged, std::move(psi)};
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r)
    if (results[r].bits < results[best].bits) best = r;

  MinEntropyResult out;
  out.bits = std::max(0.0, results[best].bits);
  out.converged = results[best].converged;
  out.argmin = std::move(results[best].psi);
  return out;
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kAdditiveWithinTolerance:
      return "additive_within_tolerance";
    case Verdict::kSuperadditiveSignal:
      return "superadditive_signal";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

AdditivityReport additivity_experiment(const QuantumChannel& a,
                                       const QuantumChannel& b,
                                       const OptimizerConfig& opt) {
  validate_opt(opt);
  if (a.dim_in() * b.dim_in() > 16)
    throw ValidationError(
        "joint input dimension above the desk-scale guard (16)");

  OptimizerConfig oa = opt;
  OptimizerConfig ob = opt;
  OptimizerConfig oj = opt;
  ob.seed = opt.seed + 1;
  oj.seed = opt.seed + 2;

  const CapacityResult ca = holevo_capacity(a, oa);
  const CapacityResult cb = holevo_capacity(b, ob);

  // Product of the factor optima: a feasible joint ensemble achieving
  // chi_1 + chi_2 exactly, so the joint ascent starts at the floor.
  PureEnsemble product;
  for (std::size_t i = 0; i < ca.argmax.states.size(); ++i) {
    for (std::size_t j = 0; j < cb.argmax.states.size(); ++j) {
      const double pq = ca.argmax.probs[i] * cb.argmax.probs[j];
      std::vector<cplx> joint_state(
          static_cast<std::size_t>(a.dim_in()) * b.dim_in());
      for (int r = 0; r < a.dim_in(); ++r)
        for (int s = 0; s < b.dim_in(); ++s)
          joint_state[static_cast<std::size_t>(r) * b.dim_in() + s] =
              ca.argmax.states[i][r] * cb.argmax.states[j][s];
      product.probs.push_back(pq);
      product.states.push_back(std::move(joint_state));
    }
  }
  double psum = 0.0;
  for (const double q : product.probs) psum += q;
  for (auto& q : product.probs) q /= psum;

  const QuantumChannel joint = tensor_channel(a, b);
  const CapacityResult cj = holevo_capacity(joint, oj, {product});

  AdditivityReport report;
  report.chi_1 = ca.bits;
  report.chi_2 = cb.bits;
  report.chi_joint = cj.bits;
  report.defect = cj.bits - ca.bits - cb.bits;
  report.optimizer_tolerance = opt.tolerance;
  report.floor_violated = report.defect < -2.0 * opt.tolerance;

  if (!ca.converged || !cb.converged || !cj.converged) {
    report.verdict = Verdict::kInconclusive;
  } else if (std::fabs(report.defect) <= 3.0 * opt.tolerance) {
    report.verdict = Verdict::kAdditiveWithinTolerance;
  } else if (report.defect > 3.0 * opt.tolerance) {
    report.verdict = Verdict::kSuperadditiveSignal;
  } else {
    report.verdict = Verdict::kInconclusive;
  }
  return report;
}

}  // namespace opstat
