#pragma once

#include <functional>
#include <vector>

#include "opstat/complex_matrix.hpp"

namespace opstat {

// Self-adjoint operator; construction enforces ||M - M^dagger||_max <= 1e-12.
class HermitianOperator {
 public:
  explicit HermitianOperator(ComplexMatrix m);
  const ComplexMatrix& matrix() const { return m_; }
  int dim() const { return m_.rows(); }

 private:
  ComplexMatrix m_;
};

// Unitary operator; construction enforces ||U^dagger U - I||_max <= 1e-10.
class UnitaryOperator {
 public:
  explicit UnitaryOperator(ComplexMatrix m);
  const ComplexMatrix& matrix() const { return m_; }
  int dim() const { return m_.rows(); }

 private:
  ComplexMatrix m_;
};

// Orthogonal projection; idempotent to 1e-10 and self-adjoint to 1e-12.
class ProjectionOperator {
 public:
  explicit ProjectionOperator(ComplexMatrix m);
  const ComplexMatrix& matrix() const { return m_; }
  int dim() const { return m_.rows(); }
  int rank() const { return rank_; }

 private:
  ComplexMatrix m_;
  int rank_ = 0;
};

// Eigenvalues with an orthonormal eigenbasis. Hermitian input yields real
// eigenvalues sorted ascending; unitary input yields unit-modulus eigenvalues
// sorted by phase in [0, 2pi).
struct SpectralDecomposition {
  std::vector<cplx> eigenvalues;
  ComplexMatrix eigenvectors;  // k-th column pairs with eigenvalues[k]

  int dim() const { return eigenvectors.rows(); }
  std::vector<double> real_eigenvalues() const;
  std::vector<double> phases() const;
  std::vector<cplx> eigenvector(int k) const;
};

// Half-open arc [lo, hi) of the unit circle, 0 <= lo < hi <= 2pi.
// Membership snaps a phase within 1e-12 of either endpoint onto it before
// the half-open test, so partition boundaries behave deterministically.
struct BorelArc {
  double lo;
  double hi;

  BorelArc(double lo_rad, double hi_rad);
  bool contains(double theta) const;
  double length() const { return hi - lo; }
};

// Phase of a (unit-modulus) complex number mapped to [0, 2pi); values within
// 1e-12 of 2pi wrap to 0.
double eigenphase(cplx lambda);

// --- operations ---

// Eigendecomposition of a Hermitian operator: real ascending eigenvalues,
// orthonormal eigenvectors, reconstruction verified to 1e-9.
SpectralDecomposition eig_hermitian(const HermitianOperator& h);

// Eigendecomposition of a unitary operator via its Schur form; eigenvalues
// are normalized to unit modulus and sorted by phase. Eigenvectors within a
// degenerate phase cluster are re-orthonormalized.
SpectralDecomposition eig_unitary(const UnitaryOperator& u);

// U = (H - iI)(H + iI)^{-1}. Always defined for Hermitian H.
UnitaryOperator cayley_transform(const HermitianOperator& h);

// H = i(I + U)(I - U)^{-1}; requires the spectrum of U to stay at least
// 1e-8 away from +1 (the point the Cayley image omits).
HermitianOperator inverse_cayley(const UnitaryOperator& u);

// Spectral projector onto the eigenphases of U lying in the arc.
ProjectionOperator spectral_projector(const UnitaryOperator& u, const BorelArc& arc);
ProjectionOperator spectral_projector(const SpectralDecomposition& s, const BorelArc& arc);

// Validates that the arcs are pairwise disjoint and cover [0, 2pi) to within
// 1e-12 at the endpoints; throws ValidationError naming the offending arcs.
void validate_partition(const std::vector<BorelArc>& partition);

// One projector per arc of a validated partition; their sum is verified to
// be the identity to 1e-9.
std::vector<ProjectionOperator> resolution_of_identity(
    const UnitaryOperator& u, const std::vector<BorelArc>& partition);
std::vector<ProjectionOperator> resolution_of_identity(
    const SpectralDecomposition& s, const std::vector<BorelArc>& partition);

// V diag(f(lambda)) V^dagger. f may throw DomainError.
ComplexMatrix matrix_function(const SpectralDecomposition& s,
                              const std::function<cplx(cplx)>& f);

// Largest singular value.
double operator_2norm(const ComplexMatrix& m);

// k equal arcs covering [0, 2pi) with exactly shared endpoints.
std::vector<BorelArc> equal_partition(int k);

// Linear solve A X = B (partial-pivot LU) with a residual check.
ComplexMatrix solve_linear(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace opstat
