#include "opstat/channel.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "opstat/errors.hpp"
#include "opstat/operator_core.hpp"
#include "opstat/rng.hpp"
#include "opstat/tolerances.hpp"

namespace opstat {

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  if (!m_.is_square()) throw ValidationError("density matrix must be square");
  const double herm = max_abs_diff(m_, m_.adjoint());
  if (herm > tol::kHermitian) {
    std::ostringstream msg;
    msg << "density matrix is not Hermitian (defect " << herm << ")";
    throw ValidationError(msg.str());
  }
  const double tr = m_.trace().real();
  if (std::fabs(tr - 1.0) > tol::kTrace) {
    std::ostringstream msg;
    msg << "density matrix trace is " << tr << ", expected 1";
    throw ValidationError(msg.str());
  }
  const ComplexMatrix sym = (m_ + m_.adjoint()) * cplx{0.5, 0.0};
  const SpectralDecomposition s = eig_hermitian(HermitianOperator(sym));
  if (s.eigenvalues.front().real() < -tol::kPsdEigen) {
    std::ostringstream msg;
    msg << "density matrix has eigenvalue " << s.eigenvalues.front().real()
        << " below -" << tol::kPsdEigen;
    throw ValidationError(msg.str());
  }
}

DensityMatrix DensityMatrix::pure(const std::vector<cplx>& psi) {
  const double norm = vec_norm(psi);
  if (norm == 0.0) throw ValidationError("pure state from the zero vector");
  const int n = static_cast<int>(psi.size());
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = psi[i] * std::conj(psi[j]) / (norm * norm);
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(int n) {
  ComplexMatrix m = ComplexMatrix::identity(n);
  m *= cplx{1.0 / n, 0.0};
  return DensityMatrix(std::move(m));
}

QuantumChannel::QuantumChannel(int dim_in, int dim_out,
                               std::vector<ComplexMatrix> kraus)
    : dim_in_(dim_in), dim_out_(dim_out), kraus_(std::move(kraus)) {
  if (dim_in_ < 1 || dim_out_ < 1)
    throw ValidationError("channel dimensions must be >= 1");
  if (kraus_.empty()) throw ValidationError("channel needs >= 1 Kraus operator");
  for (const auto& k : kraus_) {
    if (k.rows() != dim_out_ || k.cols() != dim_in_) {
      std::ostringstream msg;
      msg << "Kraus operator is " << k.rows() << "x" << k.cols()
          << ", expected " << dim_out_ << "x" << dim_in_;
      throw ValidationError(msg.str());
    }
  }
  ComplexMatrix gram = ComplexMatrix::zero(dim_in_);
  for (const auto& k : kraus_) gram += k.adjoint() * k;
  const double defect = max_abs_diff(gram, ComplexMatrix::identity(dim_in_));
  if (defect > tol::kTracePreserving) {
    std::ostringstream msg;
    msg << "channel is not trace preserving: ||sum K*K - I||_max = " << defect;
    throw ValidationError(msg.str());
  }
}

QuantumChannel QuantumChannel::identity(int n) {
  std::vector<ComplexMatrix> kraus{ComplexMatrix::identity(n)};
  return QuantumChannel(n, n, std::move(kraus));
}

QuantumChannel QuantumChannel::depolarizing(double p) {
  if (p < 0.0 || p > 1.0)
    throw ValidationError("depolarizing parameter must be in [0, 1]");
  const double s0 = std::sqrt(1.0 - 0.75 * p);
  const double s = std::sqrt(0.25 * p);
  std::vector<ComplexMatrix> kraus;
  kraus.push_back(ComplexMatrix::square(2, {s0, 0.0, 0.0, s0}));
  kraus.push_back(ComplexMatrix::square(2, {0.0, s, s, 0.0}));
  kraus.push_back(
      ComplexMatrix::square(2, {0.0, cplx{0.0, -s}, cplx{0.0, s}, 0.0}));
  kraus.push_back(ComplexMatrix::square(2, {s, 0.0, 0.0, -s}));
  return QuantumChannel(2, 2, std::move(kraus));
}

QuantumChannel QuantumChannel::completely_depolarizing(int n) {
  if (n < 1) throw ValidationError("dimension must be >= 1");
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ComplexMatrix k(n, n);
      k(i, j) = s;
      kraus.push_back(std::move(k));
    }
  return QuantumChannel(n, n, std::move(kraus));
}

QuantumChannel QuantumChannel::dephasing(double p) {
  if (p < 0.0 || p > 1.0)
    throw ValidationError("dephasing parameter must be in [0, 1]");
  const double a = std::sqrt(1.0 - p), b = std::sqrt(p);
  std::vector<ComplexMatrix> kraus;
  kraus.push_back(ComplexMatrix::square(2, {a, 0.0, 0.0, a}));
  kraus.push_back(ComplexMatrix::square(2, {b, 0.0, 0.0, -b}));
  return QuantumChannel(2, 2, std::move(kraus));
}

Ensemble::Ensemble(std::vector<double> p, std::vector<DensityMatrix> s)
    : probs(std::move(p)), states(std::move(s)) {
  if (probs.size() != states.size() || probs.empty())
    throw ValidationError("ensemble needs equally many probabilities and states");
  double sum = 0.0;
  for (const double q : probs) {
    if (q < 0.0) throw ValidationError("ensemble probability is negative");
    sum += q;
  }
  if (std::fabs(sum - 1.0) > tol::kProbSum) {
    std::ostringstream msg;
    msg << "ensemble probabilities sum to " << sum << ", expected 1";
    throw ValidationError(msg.str());
  }
  for (const auto& st : states)
    if (st.dim() != states.front().dim())
      throw ValidationError("ensemble states have mixed dimensions");
}

DensityMatrix apply_channel(const QuantumChannel& ch, const DensityMatrix& rho) {
  if (rho.dim() != ch.dim_in()) {
    std::ostringstream msg;
    msg << "state dimension " << rho.dim() << " does not match channel input "
        << ch.dim_in();
    throw ValidationError(msg.str());
  }
  ComplexMatrix out = ComplexMatrix::zero(ch.dim_out());
  for (const auto& k : ch.kraus()) out += (k * rho.matrix()) * k.adjoint();
  return DensityMatrix(std::move(out));
}

double von_neumann_entropy(const DensityMatrix& rho) {
  const ComplexMatrix sym = (rho.matrix() + rho.matrix().adjoint()) * cplx{0.5, 0.0};
  const SpectralDecomposition s = eig_hermitian(HermitianOperator(sym));
  double bits = 0.0;
  for (const auto& ev : s.eigenvalues) {
    double lambda = ev.real();
    if (lambda < 0.0) {
      if (lambda < -tol::kPsdEigen) {
        std::ostringstream msg;
        msg << "entropy of a non-positive matrix (eigenvalue " << lambda << ")";
        throw NumericError(msg.str());
      }
      lambda = 0.0;
    }
    if (lambda > 0.0) bits -= lambda * std::log2(lambda);
  }
  return bits < 0.0 ? 0.0 : bits;
}

double holevo_chi(const QuantumChannel& ch, const Ensemble& ens) {
  ComplexMatrix avg = ComplexMatrix::zero(ch.dim_out());
  double mean_entropy = 0.0;
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const DensityMatrix out = apply_channel(ch, ens.states[i]);
    avg += out.matrix() * cplx{ens.probs[i], 0.0};
    mean_entropy += ens.probs[i] * von_neumann_entropy(out);
  }
  return von_neumann_entropy(DensityMatrix(std::move(avg))) - mean_entropy;
}

QuantumChannel tensor_channel(const QuantumChannel& a, const QuantumChannel& b) {
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(a.kraus().size() * b.kraus().size());
  for (const auto& ka : a.kraus())
    for (const auto& kb : b.kraus()) kraus.push_back(kron(ka, kb));
  return QuantumChannel(a.dim_in() * b.dim_in(), a.dim_out() * b.dim_out(),
                        std::move(kraus));
}

DensityMatrix tensor_state(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(kron(a.matrix(), b.matrix()));
}

QuantumChannel random_channel(int dim, int kraus_count, std::uint64_t seed) {
  if (dim < 1) throw ValidationError("dimension must be >= 1");
  if (kraus_count < 1) throw ValidationError("kraus_count must be >= 1");
  const int rows = dim * kraus_count;
  Philox gen(seed, stream_id(Stream::kChannelSample));
  ComplexMatrix g(rows, dim);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < dim; ++j)
      g(i, j) = cplx{gen.next_normal(), gen.next_normal()};

  // Thin QR by twice-through modified Gram-Schmidt; R has a positive
  // diagonal, so Q is Haar-distributed for Ginibre input.
  for (int pass = 0; pass < 2; ++pass) {
    for (int j = 0; j < dim; ++j) {
      for (int k = 0; k < j; ++k) {
        cplx proj = 0.0;
        for (int i = 0; i < rows; ++i) proj += std::conj(g(i, k)) * g(i, j);
        for (int i = 0; i < rows; ++i) g(i, j) -= proj * g(i, k);
      }
      double norm = 0.0;
      for (int i = 0; i < rows; ++i) norm += std::norm(g(i, j));
      norm = std::sqrt(norm);
      if (norm < 1e-12)
        throw NumericError("rank-deficient Gaussian sample in random_channel");
      for (int i = 0; i < rows; ++i) g(i, j) /= norm;
    }
  }

  std::vector<ComplexMatrix> kraus;
  kraus.reserve(kraus_count);
  for (int blk = 0; blk < kraus_count; ++blk) {
    ComplexMatrix k(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) k(i, j) = g(blk * dim + i, j);
    kraus.push_back(std::move(k));
  }
  return QuantumChannel(dim, dim, std::move(kraus));
}

}  // namespace opstat
