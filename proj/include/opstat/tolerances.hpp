#pragma once

namespace opstat::tol {

// One source of truth for "numerically true". The test suite and the
// acceptance suite use these same constants.

// Construction-time structure checks
inline constexpr double kHermitian = 1e-12;     // ||M - M^dagger||_max
inline constexpr double kUnitary = 1e-10;       // ||U^dagger U - I||_max
inline constexpr double kIdempotent = 1e-10;    // ||P^2 - P||_max
inline constexpr double kOrthonormal = 1e-10;   // ||V^dagger V - I||_max
inline constexpr double kReconstruction = 1e-9; // ||V diag V^dagger - M||_max

// Projection-valued-measure checks
inline constexpr double kCompleteness = 1e-9;   // ||sum P_j - I||_max
inline constexpr double kAdditivity = 1e-9;     // operator-norm defect
inline constexpr double kArcEndpoint = 1e-12;   // partition endpoint matching
inline constexpr double kBoundarySnap = 1e-12;  // eigenphase boundary snapping

// Density matrices and channels
inline constexpr double kTrace = 1e-10;          // |tr(rho) - 1|
inline constexpr double kPsdEigen = 1e-10;       // eigenvalue clamp window
inline constexpr double kTracePreserving = 1e-10;
inline constexpr double kProbSum = 1e-12;        // ensemble probabilities

// Cayley transform
inline constexpr double kCayleySingular = 1e-8;  // spectrum distance to +1
inline constexpr double kCayleyRoundTrip = 1e-7;

// Codec
inline constexpr double kPointDedup = 1e-12;
inline constexpr double kAreaPartition = 1e-9;   // sum of cell areas vs 1

}  // namespace opstat::tol
