#include "opstat/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "opstat/errors.hpp"
#include "opstat/tolerances.hpp"

namespace opstat {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void require_square(const ComplexMatrix& m, const char* what) {
  if (!m.is_square()) {
    std::ostringstream msg;
    msg << what << " must be square, got " << m.rows() << "x" << m.cols();
    throw ValidationError(msg.str());
  }
}

}  // namespace

HermitianOperator::HermitianOperator(ComplexMatrix m) : m_(std::move(m)) {
  require_square(m_, "Hermitian operator");
  const double defect = max_abs_diff(m_, m_.adjoint());
  if (defect > tol::kHermitian) {
    std::ostringstream msg;
    msg << "matrix is not self-adjoint: ||M - M*||_max = " << defect;
    throw ValidationError(msg.str());
  }
}

UnitaryOperator::UnitaryOperator(ComplexMatrix m) : m_(std::move(m)) {
  require_square(m_, "unitary operator");
  const ComplexMatrix gram = m_.adjoint() * m_;
  const double defect = max_abs_diff(gram, ComplexMatrix::identity(m_.rows()));
  if (defect > tol::kUnitary) {
    std::ostringstream msg;
    msg << "matrix is not unitary: ||U*U - I||_max = " << defect;
    throw ValidationError(msg.str());
  }
}

ProjectionOperator::ProjectionOperator(ComplexMatrix m) : m_(std::move(m)) {
  require_square(m_, "projection operator");
  const double herm_defect = max_abs_diff(m_, m_.adjoint());
  if (herm_defect > tol::kHermitian) {
    std::ostringstream msg;
    msg << "projection is not self-adjoint: ||P - P*||_max = " << herm_defect;
    throw ValidationError(msg.str());
  }
  const double idem_defect = max_abs_diff(m_ * m_, m_);
  if (idem_defect > tol::kIdempotent) {
    std::ostringstream msg;
    msg << "projection is not idempotent: ||P^2 - P||_max = " << idem_defect;
    throw ValidationError(msg.str());
  }
  rank_ = static_cast<int>(std::lround(m_.trace().real()));
}

std::vector<double> SpectralDecomposition::real_eigenvalues() const {
  std::vector<double> out(eigenvalues.size());
  for (std::size_t k = 0; k < eigenvalues.size(); ++k)
    out[k] = eigenvalues[k].real();
  return out;
}

std::vector<double> SpectralDecomposition::phases() const {
  std::vector<double> out(eigenvalues.size());
  for (std::size_t k = 0; k < eigenvalues.size(); ++k)
    out[k] = eigenphase(eigenvalues[k]);
  return out;
}

std::vector<cplx> SpectralDecomposition::eigenvector(int k) const {
  std::vector<cplx> v(eigenvectors.rows());
  for (int i = 0; i < eigenvectors.rows(); ++i) v[i] = eigenvectors(i, k);
  return v;
}

double eigenphase(cplx lambda) {
  double theta = std::arg(lambda);
  if (theta < 0.0) theta += kTwoPi;
  if (theta >= kTwoPi - tol::kBoundarySnap) theta = 0.0;
  return theta;
}

BorelArc::BorelArc(double lo_rad, double hi_rad) : lo(lo_rad), hi(hi_rad) {
  if (!(lo >= 0.0) || !(lo < hi) || !(hi <= kTwoPi)) {
    std::ostringstream msg;
    msg << "invalid arc [" << lo_rad << ", " << hi_rad
        << "): need 0 <= lo < hi <= 2pi";
    throw ValidationError(msg.str());
  }
}

bool BorelArc::contains(double theta) const {
  if (std::fabs(theta - lo) <= tol::kBoundarySnap) return true;
  if (std::fabs(theta - hi) <= tol::kBoundarySnap) return false;
  return theta > lo && theta < hi;
}

UnitaryOperator cayley_transform(const HermitianOperator& h) {
  const int n = h.dim();
  ComplexMatrix minus = h.matrix();  // H - iI
  ComplexMatrix plus = h.matrix();   // H + iI
  for (int i = 0; i < n; ++i) {
    minus(i, i) -= cplx{0.0, 1.0};
    plus(i, i) += cplx{0.0, 1.0};
  }
  // (H - iI) and (H + iI)^{-1} commute, so U solves (H + iI) U = (H - iI).
  ComplexMatrix u = solve_linear(plus, minus);
  try {
    return UnitaryOperator(std::move(u));
  } catch (const ValidationError& e) {
    throw NumericError(std::string("Cayley transform lost unitarity: ") +
                       e.what());
  }
}

HermitianOperator inverse_cayley(const UnitaryOperator& u) {
  const SpectralDecomposition s = eig_unitary(u);
  for (const auto& lambda : s.eigenvalues) {
    if (std::abs(lambda - cplx{1.0, 0.0}) <= tol::kCayleySingular)
      throw ValidationError(
          "spectrum touches the singular point of the inverse Cayley "
          "transform (eigenvalue at +1)");
  }
  const int n = u.dim();
  ComplexMatrix lhs = ComplexMatrix::identity(n);  // I - U
  ComplexMatrix rhs = u.matrix();                  // i(I + U)
  for (int i = 0; i < n; ++i) rhs(i, i) += 1.0;
  rhs *= cplx{0.0, 1.0};
  lhs -= u.matrix();
  ComplexMatrix m = solve_linear(lhs, rhs);
  // Symmetrize roundoff; (M + M*)/2 is exactly self-adjoint in floating point.
  const ComplexMatrix sym = (m + m.adjoint()) * cplx{0.5, 0.0};
  const double skew = max_abs_diff(m, sym);
  if (skew > 1e-8 * std::max(1.0, m.max_abs())) {
    std::ostringstream msg;
    msg << "inverse Cayley produced a non-Hermitian result (skew " << skew
        << ")";
    throw NumericError(msg.str());
  }
  return HermitianOperator(sym);
}

ProjectionOperator spectral_projector(const SpectralDecomposition& s,
                                      const BorelArc& arc) {
  const int n = s.dim();
  const std::vector<double> ph = s.phases();
  std::vector<int> selected;
  for (int k = 0; k < n; ++k)
    if (arc.contains(ph[k])) selected.push_back(k);
  if (selected.empty()) return ProjectionOperator(ComplexMatrix::zero(n));
  ComplexMatrix w(n, static_cast<int>(selected.size()));
  for (std::size_t j = 0; j < selected.size(); ++j)
    for (int i = 0; i < n; ++i) w(i, static_cast<int>(j)) = s.eigenvectors(i, selected[j]);
  return ProjectionOperator(gram_outer(w));
}

ProjectionOperator spectral_projector(const UnitaryOperator& u,
                                      const BorelArc& arc) {
  return spectral_projector(eig_unitary(u), arc);
}

void validate_partition(const std::vector<BorelArc>& partition) {
  if (partition.empty())
    throw ValidationError("partition must contain at least one arc");
  std::vector<std::size_t> order(partition.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return partition[a].lo < partition[b].lo;
  });

  auto arc_str = [&](std::size_t idx) {
    std::ostringstream ss;
    ss << "arc " << idx << " = [" << partition[idx].lo << ", "
       << partition[idx].hi << ")";
    return ss.str();
  };

  if (std::fabs(partition[order.front()].lo) > tol::kArcEndpoint) {
    throw ValidationError("partition does not start at 0: first cell is " +
                          arc_str(order.front()));
  }
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    const double gap = partition[order[k + 1]].lo - partition[order[k]].hi;
    if (std::fabs(gap) > tol::kArcEndpoint) {
      std::ostringstream msg;
      msg << "partition cells " << (gap > 0 ? "leave a gap" : "overlap")
          << " between " << arc_str(order[k]) << " and " << arc_str(order[k + 1]);
      throw ValidationError(msg.str());
    }
  }
  if (std::fabs(partition[order.back()].hi - kTwoPi) > tol::kArcEndpoint) {
    throw ValidationError("partition does not reach 2pi: last cell is " +
                          arc_str(order.back()));
  }
}

std::vector<ProjectionOperator> resolution_of_identity(
    const SpectralDecomposition& s, const std::vector<BorelArc>& partition) {
  validate_partition(partition);
  std::vector<ProjectionOperator> projectors;
  projectors.reserve(partition.size());
  for (const auto& arc : partition)
    projectors.push_back(spectral_projector(s, arc));

  ComplexMatrix sum = ComplexMatrix::zero(s.dim());
  for (const auto& p : projectors) sum += p.matrix();
  const double defect = max_abs_diff(sum, ComplexMatrix::identity(s.dim()));
  if (defect > tol::kCompleteness) {
    std::ostringstream msg;
    msg << "projectors do not resolve the identity (defect " << defect << ")";
    throw NumericError(msg.str());
  }
  return projectors;
}

std::vector<ProjectionOperator> resolution_of_identity(
    const UnitaryOperator& u, const std::vector<BorelArc>& partition) {
  return resolution_of_identity(eig_unitary(u), partition);
}

ComplexMatrix matrix_function(const SpectralDecomposition& s,
                              const std::function<cplx(cplx)>& f) {
  ComplexMatrix scaled = s.eigenvectors;
  for (int j = 0; j < scaled.cols(); ++j) {
    const cplx fv = f(s.eigenvalues[j]);
    if (!std::isfinite(fv.real()) || !std::isfinite(fv.imag())) {
      std::ostringstream msg;
      msg << "scalar function not finite at eigenvalue " << s.eigenvalues[j];
      throw DomainError(msg.str());
    }
    for (int i = 0; i < scaled.rows(); ++i) scaled(i, j) *= fv;
  }
  return scaled * s.eigenvectors.adjoint();
}

double operator_2norm(const ComplexMatrix& m) {
  const HermitianOperator gram(m.adjoint() * m);
  const SpectralDecomposition s = eig_hermitian(gram);
  double top = s.eigenvalues.back().real();
  if (top < 0.0) top = 0.0;
  return std::sqrt(top);
}

std::vector<BorelArc> equal_partition(int k) {
  if (k < 1) throw ValidationError("partition size must be >= 1");
  std::vector<double> bounds(k + 1);
  for (int j = 0; j <= k; ++j) bounds[j] = kTwoPi * j / k;
  bounds[k] = kTwoPi;
  std::vector<BorelArc> arcs;
  arcs.reserve(k);
  for (int j = 0; j < k; ++j) arcs.emplace_back(bounds[j], bounds[j + 1]);
  return arcs;
}

}  // namespace opstat
