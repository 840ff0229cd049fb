#pragma once

#include <cstdint>

#include "opstat/operator_core.hpp"

namespace opstat {

// Gaussian Hermitian sample H = (A + A^dagger)/2; when norm_bound > 0 the
// operator is rescaled so its 2-norm does not exceed the bound.
HermitianOperator random_hermitian(int dim, std::uint64_t seed,
                                   double norm_bound = 0.0);

// Haar-distributed unitary (QR of a complex Ginibre sample with positive
// diagonal R).
UnitaryOperator random_haar_unitary(int dim, std::uint64_t seed);

}  // namespace opstat
