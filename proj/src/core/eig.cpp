// Eigendecomposition and linear-solve backend (Eigen). Everything else in
// operator-core goes through the project's own kernels; the iterative
// eigensolvers and pivoted LU are delegated to Eigen and re-validated against
// the module contracts on the way out.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "opstat/errors.hpp"
#include "opstat/operator_core.hpp"
#include "opstat/tolerances.hpp"

namespace opstat {
namespace {

Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
  Eigen::MatrixXcd out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

ComplexMatrix from_eigen(const Eigen::MatrixXcd& m) {
  ComplexMatrix out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

void check_orthonormal(const ComplexMatrix& v) {
  const ComplexMatrix gram = v.adjoint() * v;
  const double defect = max_abs_diff(gram, ComplexMatrix::identity(v.cols()));
  if (defect > tol::kOrthonormal) {
    std::ostringstream msg;
    msg << "eigenvector basis lost orthonormality (defect " << defect << ")";
    throw NumericError(msg.str());
  }
}

void check_reconstruction(const SpectralDecomposition& s,
                          const ComplexMatrix& source) {
  ComplexMatrix scaled = s.eigenvectors;
  for (int j = 0; j < scaled.cols(); ++j)
    for (int i = 0; i < scaled.rows(); ++i) scaled(i, j) *= s.eigenvalues[j];
  const ComplexMatrix rebuilt = scaled * s.eigenvectors.adjoint();
  const double residual = max_abs_diff(rebuilt, source);
  if (residual > tol::kReconstruction) {
    std::ostringstream msg;
    msg << "eigendecomposition failed to reconstruct the operator (residual "
        << residual << ")";
    throw NumericError(msg.str());
  }
}

// Modified Gram-Schmidt over a contiguous column range [first, last).
void reorthonormalize_columns(ComplexMatrix& v, int first, int last) {
  const int n = v.rows();
  for (int j = first; j < last; ++j) {
    for (int k = first; k < j; ++k) {
      cplx proj = 0.0;
      for (int i = 0; i < n; ++i) proj += std::conj(v(i, k)) * v(i, j);
      for (int i = 0; i < n; ++i) v(i, j) -= proj * v(i, k);
    }
    double norm = 0.0;
    for (int i = 0; i < n; ++i) norm += std::norm(v(i, j));
    norm = std::sqrt(norm);
    if (norm < 1e-8)
      throw NumericError("degenerate eigenvector cluster collapsed");
    for (int i = 0; i < n; ++i) v(i, j) /= norm;
  }
}

}  // namespace

SpectralDecomposition eig_hermitian(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_eigen(h.matrix()));
  if (solver.info() != Eigen::Success) {
    const double residual = h.matrix().max_abs();
    std::ostringstream msg;
    msg << "hermitian eigensolver did not converge (operator max-entry "
        << residual << ")";
    throw NumericError(msg.str());
  }
  SpectralDecomposition s{std::vector<cplx>(h.dim()),
                          from_eigen(solver.eigenvectors())};
  for (int k = 0; k < h.dim(); ++k) s.eigenvalues[k] = solver.eigenvalues()(k);
  check_orthonormal(s.eigenvectors);
  check_reconstruction(s, h.matrix());
  return s;
}

SpectralDecomposition eig_unitary(const UnitaryOperator& u) {
  // The Schur form of a normal operator is diagonal, so the Schur basis is an
  // orthonormal eigenbasis up to roundoff.
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(to_eigen(u.matrix()));
  if (schur.info() != Eigen::Success)
    throw NumericError("Schur decomposition did not converge");

  const int n = u.dim();
  std::vector<cplx> vals(n);
  for (int k = 0; k < n; ++k) {
    cplx t = schur.matrixT()(k, k);
    const double mod = std::abs(t);
    if (mod < 0.5) throw NumericError("unitary eigenvalue far from unit circle");
    vals[k] = t / mod;
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> theta(n);
  for (int k = 0; k < n; ++k) theta[k] = eigenphase(vals[k]);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return theta[a] < theta[b]; });

  SpectralDecomposition s{std::vector<cplx>(n), ComplexMatrix(n, n)};
  const Eigen::MatrixXcd& q = schur.matrixU();
  for (int k = 0; k < n; ++k) {
    s.eigenvalues[k] = vals[order[k]];
    for (int i = 0; i < n; ++i) s.eigenvectors(i, k) = q(i, order[k]);
  }

  // The Schur basis is globally orthonormal; re-enforce it within degenerate
  // phase clusters where the eigenvalue pairing is ambiguous.
  constexpr double kClusterTol = 1e-8;
  const std::vector<double> ph = s.phases();
  int start = 0;
  for (int k = 1; k <= n; ++k) {
    if (k == n || ph[k] - ph[k - 1] > kClusterTol) {
      if (k - start > 1) reorthonormalize_columns(s.eigenvectors, start, k);
      start = k;
    }
  }

  check_orthonormal(s.eigenvectors);
  check_reconstruction(s, u.matrix());
  return s;
}

ComplexMatrix solve_linear(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (!a.is_square() || a.rows() != b.rows())
    throw ValidationError("linear solve shape mismatch");
  const Eigen::MatrixXcd ea = to_eigen(a);
  const Eigen::MatrixXcd eb = to_eigen(b);
  const Eigen::MatrixXcd x = ea.partialPivLu().solve(eb);
  const ComplexMatrix out = from_eigen(x);
  if (!out.is_finite()) throw NumericError("singular system in linear solve");
  const double residual = (ea * x - eb).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, b.max_abs());
  if (residual > 1e-8 * scale) {
    std::ostringstream msg;
    msg << "ill-conditioned linear solve (residual " << residual << ")";
    throw NumericError(msg.str());
  }
  return out;
}

}  // namespace opstat
