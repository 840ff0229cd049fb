#include "opstat/random_ops.hpp"

#include <cmath>

#include "opstat/errors.hpp"
#include "opstat/rng.hpp"

namespace opstat {

HermitianOperator random_hermitian(int dim, std::uint64_t seed,
                                   double norm_bound) {
  if (dim < 1) throw ValidationError("dimension must be >= 1");
  Philox gen(seed, stream_id(Stream::kRandomOperator));
  ComplexMatrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      a(i, j) = cplx{gen.next_normal(), gen.next_normal()};
  ComplexMatrix h = (a + a.adjoint()) * cplx{0.5, 0.0};
  if (norm_bound > 0.0) {
    const double norm = operator_2norm(h);
    if (norm > norm_bound) h *= cplx{norm_bound / norm, 0.0};
  }
  return HermitianOperator(std::move(h));
}

UnitaryOperator random_haar_unitary(int dim, std::uint64_t seed) {
  if (dim < 1) throw ValidationError("dimension must be >= 1");
  Philox gen(seed, stream_id(Stream::kRandomOperator, 1));
  ComplexMatrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      g(i, j) = cplx{gen.next_normal(), gen.next_normal()};
  for (int pass = 0; pass < 2; ++pass) {
    for (int j = 0; j < dim; ++j) {
      for (int k = 0; k < j; ++k) {
        cplx proj = 0.0;
        for (int i = 0; i < dim; ++i) proj += std::conj(g(i, k)) * g(i, j);
        for (int i = 0; i < dim; ++i) g(i, j) -= proj * g(i, k);
      }
      double norm = 0.0;
      for (int i = 0; i < dim; ++i) norm += std::norm(g(i, j));
      norm = std::sqrt(norm);
      if (norm < 1e-12)
        throw NumericError("rank-deficient Gaussian sample in random_haar_unitary");
      for (int i = 0; i < dim; ++i) g(i, j) /= norm;
    }
  }
  return UnitaryOperator(std::move(g));
}

}  // namespace opstat
