#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "opstat/errors.hpp"
#include "opstat/operator_core.hpp"
#include "opstat/random_ops.hpp"
#include "opstat/rng.hpp"
#include "opstat/tolerances.hpp"

using namespace opstat;

namespace {
const cplx I{0.0, 1.0};
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

TEST_CASE("type invariants are enforced at construction") {
  CHECK_THROWS_AS(ComplexMatrix(0, 0), ValidationError);
  CHECK_THROWS_AS(HermitianOperator(ComplexMatrix::square(2, {0, 1, 2, 0})),
                  ValidationError);
  CHECK_THROWS_AS(UnitaryOperator(ComplexMatrix::square(2, {1, 0, 0, 2})),
                  ValidationError);
  CHECK_THROWS_AS(ProjectionOperator(ComplexMatrix::square(2, {0.5, 0, 0, 2})),
                  ValidationError);
  // NaN entries are rejected by the matrix constructor itself
  CHECK_THROWS_AS(
      ComplexMatrix(1, 1, {cplx{std::nan(""), 0.0}}), ValidationError);
}

TEST_CASE("eig_hermitian: identity, diagonal, Pauli-X") {
  // identity: both eigenvalues 1
  const auto s_id = eig_hermitian(HermitianOperator(ComplexMatrix::identity(2)));
  CHECK(s_id.eigenvalues[0].real() == doctest::Approx(1.0));
  CHECK(s_id.eigenvalues[1].real() == doctest::Approx(1.0));

  // diag(3, -1): sorted ascending
  const auto s_diag =
      eig_hermitian(HermitianOperator(ComplexMatrix::square(2, {3, 0, 0, -1})));
  CHECK(s_diag.eigenvalues[0].real() == doctest::Approx(-1.0));
  CHECK(s_diag.eigenvalues[1].real() == doctest::Approx(3.0));

  // Pauli-X: lambda^2 - 1 = 0 by hand
  const auto s_x =
      eig_hermitian(HermitianOperator(ComplexMatrix::square(2, {0, 1, 1, 0})));
  CHECK(s_x.eigenvalues[0].real() == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(s_x.eigenvalues[1].real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cayley transform: zero, identity, diag(1,-1)") {
  const auto u0 = cayley_transform(HermitianOperator(ComplexMatrix::zero(2)));
  CHECK(max_abs_diff(u0.matrix(), ComplexMatrix::identity(2) * cplx{-1.0, 0.0}) <
        1e-14);

  const auto u1 = cayley_transform(HermitianOperator(ComplexMatrix::identity(2)));
  CHECK(max_abs_diff(u1.matrix(), ComplexMatrix::identity(2) * (-I)) < 1e-14);

  const auto u2 =
      cayley_transform(HermitianOperator(ComplexMatrix::square(2, {1, 0, 0, -1})));
  CHECK(max_abs_diff(u2.matrix(), ComplexMatrix::square(2, {-I, 0, 0, I})) < 1e-14);
}

TEST_CASE("inverse cayley: examples and the singular point") {
  // U = -iI -> H = I
  const UnitaryOperator u1(ComplexMatrix::square(2, {-I, 0, 0, -I}));
  CHECK(max_abs_diff(inverse_cayley(u1).matrix(), ComplexMatrix::identity(2)) < 1e-12);

  // U = diag(-i, i) -> H = diag(1, -1)
  const UnitaryOperator u2(ComplexMatrix::square(2, {-I, 0, 0, I}));
  CHECK(max_abs_diff(inverse_cayley(u2).matrix(),
                     ComplexMatrix::square(2, {1, 0, 0, -1})) < 1e-12);

  // The Cayley image omits +1, so U = I is singular for the inverse.
  CHECK_THROWS_WITH_AS(inverse_cayley(UnitaryOperator(ComplexMatrix::identity(2))),
                       doctest::Contains("singular point"), ValidationError);

  // U = -I corresponds to H = 0 and round-trips cleanly.
  const UnitaryOperator um(ComplexMatrix::identity(2) * cplx{-1.0, 0.0});
  CHECK(max_abs_diff(inverse_cayley(um).matrix(), ComplexMatrix::zero(2)) < 1e-12);
}

TEST_CASE("cayley round trip and eigenphase map over random operators") {
  int trials = 0;
  for (int dim = 2; dim <= 8; ++dim) {
    for (int rep = 0; rep < 17; ++rep) {
      const HermitianOperator h =
          random_hermitian(dim, 1000 + 17 * dim + rep, 10.0);
      const UnitaryOperator u = cayley_transform(h);

      // unitarity to 1e-10 is the construction invariant; round trip to 1e-7
      CHECK(max_abs_diff(inverse_cayley(u).matrix(), h.matrix()) <= 1e-7);

      // eigenphase map: phases of U match arg((l - i)/(l + i)) as multisets
      std::vector<double> expected;
      for (const double lambda : eig_hermitian(h).real_eigenvalues())
        expected.push_back(eigenphase((lambda - I) / (lambda + I)));
      std::vector<double> actual = eig_unitary(u).phases();
      std::sort(expected.begin(), expected.end());
      std::sort(actual.begin(), actual.end());
      for (std::size_t k = 0; k < expected.size(); ++k) {
        double diff = std::fabs(expected[k] - actual[k]);
        diff = std::min(diff, kTwoPi - diff);  // circular distance
        CHECK(diff <= 1e-8);
      }
      ++trials;
    }
  }
  CHECK(trials >= 100);
}

TEST_CASE("spectral projector: full circle, empty arc, half circle") {
  const UnitaryOperator u(ComplexMatrix::square(2, {-I, 0, 0, I}));

  const auto p_full = spectral_projector(u, BorelArc(0.0, kTwoPi));
  CHECK(max_abs_diff(p_full.matrix(), ComplexMatrix::identity(2)) < 1e-12);
  CHECK(p_full.rank() == 2);

  // phases are 3pi/2 and pi/2; [0, 0.1) contains neither
  const auto p_empty = spectral_projector(u, BorelArc(0.0, 0.1));
  CHECK(p_empty.matrix().max_abs() == 0.0);
  CHECK(p_empty.rank() == 0);

  // [0, pi) contains pi/2 only -> diag(0, 1)
  const auto p_half = spectral_projector(u, BorelArc(0.0, M_PI));
  CHECK(max_abs_diff(p_half.matrix(), ComplexMatrix::square(2, {0, 0, 0, 1})) < 1e-12);
  CHECK(p_half.rank() == 1);
}

TEST_CASE("resolution of identity on the worked example") {
  const UnitaryOperator u(ComplexMatrix::square(2, {-I, 0, 0, I}));

  const auto single = resolution_of_identity(u, {BorelArc(0.0, kTwoPi)});
  REQUIRE(single.size() == 1);
  CHECK(max_abs_diff(single[0].matrix(), ComplexMatrix::identity(2)) < 1e-12);

  const auto halves =
      resolution_of_identity(u, {BorelArc(0.0, M_PI), BorelArc(M_PI, kTwoPi)});
  REQUIRE(halves.size() == 2);
  CHECK(max_abs_diff(halves[0].matrix(), ComplexMatrix::square(2, {0, 0, 0, 1})) < 1e-12);
  CHECK(max_abs_diff(halves[1].matrix(), ComplexMatrix::square(2, {1, 0, 0, 0})) < 1e-12);
}

TEST_CASE("partition validation names the offending arcs") {
  const UnitaryOperator u(ComplexMatrix::identity(2) * (-I));
  // gap between arcs 0 and 1
  CHECK_THROWS_WITH_AS(
      resolution_of_identity(u, {BorelArc(0.0, 1.0), BorelArc(1.5, kTwoPi)}),
      doctest::Contains("gap"), ValidationError);
  // overlap
  CHECK_THROWS_WITH_AS(
      resolution_of_identity(u, {BorelArc(0.0, 2.0), BorelArc(1.5, kTwoPi)}),
      doctest::Contains("overlap"), ValidationError);
  // does not reach 2pi
  CHECK_THROWS_AS(resolution_of_identity(u, {BorelArc(0.0, 3.0)}), ValidationError);
  // does not start at 0
  CHECK_THROWS_AS(
      resolution_of_identity(u, {BorelArc(0.5, kTwoPi)}), ValidationError);
}

TEST_CASE("PVM properties over random partitions") {
  Philox arc_gen(77);
  for (int rep = 0; rep < 25; ++rep) {
    const int dim = 2 + rep % 7;
    const UnitaryOperator u =
        cayley_transform(random_hermitian(dim, 4000 + rep, 10.0));
    const int k = 2 + static_cast<int>(arc_gen.next_u64() % 15);

    // random partition: k-1 interior cuts
    std::vector<double> cuts{0.0, kTwoPi};
    for (int c = 0; c < k - 1; ++c) cuts.push_back(arc_gen.next_double() * kTwoPi);
    std::sort(cuts.begin(), cuts.end());
    std::vector<BorelArc> arcs;
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j)
      if (cuts[j + 1] > cuts[j]) arcs.emplace_back(cuts[j], cuts[j + 1]);

    const auto projectors = resolution_of_identity(u, arcs);
    ComplexMatrix sum = ComplexMatrix::zero(dim);
    int total_rank = 0;
    for (const auto& p : projectors) {
      sum += p.matrix();
      total_rank += p.rank();
      // commutes with U
      CHECK(max_abs_diff(p.matrix() * u.matrix(), u.matrix() * p.matrix()) <= 1e-9);
    }
    CHECK(max_abs_diff(sum, ComplexMatrix::identity(dim)) <= tol::kCompleteness);
    CHECK(total_rank == dim);

    // mutual orthogonality
    for (std::size_t a = 0; a < projectors.size(); ++a)
      for (std::size_t b = a + 1; b < projectors.size(); ++b)
        CHECK((projectors[a].matrix() * projectors[b].matrix()).max_abs() <= 1e-9);

    // finite additivity of adjacent disjoint arcs
    if (arcs.size() >= 2) {
      const SpectralDecomposition s = eig_unitary(u);
      const ComplexMatrix joined =
          spectral_projector(s, BorelArc(arcs[0].lo, arcs[1].hi)).matrix();
      CHECK(max_abs_diff(joined, projectors[0].matrix() + projectors[1].matrix()) <=
            tol::kAdditivity);
    }
  }
}

TEST_CASE("boundary eigenphases snap deterministically") {
  // phases exactly at 0 and pi
  const UnitaryOperator u(ComplexMatrix::square(2, {1, 0, 0, -1}));
  const auto p_lo = spectral_projector(u, BorelArc(0.0, M_PI));
  CHECK(p_lo.rank() == 1);  // phase 0 in [0, pi), phase pi not
  const auto p_hi = spectral_projector(u, BorelArc(M_PI, kTwoPi));
  CHECK(p_hi.rank() == 1);  // phase pi in [pi, 2pi)
  // a phase within 1e-13 of an arc boundary lands on the boundary
  CHECK(BorelArc(0.0, M_PI).contains(M_PI - 1e-13) == false);
  CHECK(BorelArc(M_PI, kTwoPi).contains(M_PI - 1e-13) == true);
}

TEST_CASE("matrix_function: identity, exp, sqrt and the domain error") {
  const HermitianOperator h(ComplexMatrix::square(2, {4, 0, 0, 9}));
  const SpectralDecomposition s = eig_hermitian(h);

  CHECK(max_abs_diff(matrix_function(s, [](cplx z) { return z; }), h.matrix()) < 1e-12);

  const HermitianOperator hexp(ComplexMatrix::square(2, {0, 0, 0, 1}));
  const auto expm = matrix_function(eig_hermitian(hexp),
                                    [](cplx z) { return std::exp(z); });
  CHECK(max_abs_diff(expm, ComplexMatrix::square(2, {1, 0, 0, std::exp(1.0)})) < 1e-12);

  const auto sqrtm = matrix_function(s, [](cplx z) { return std::sqrt(z); });
  CHECK(max_abs_diff(sqrtm, ComplexMatrix::square(2, {2, 0, 0, 3})) < 1e-12);

  const HermitianOperator hneg(ComplexMatrix::square(2, {-4, 0, 0, 9}));
  CHECK_THROWS_AS(matrix_function(eig_hermitian(hneg),
                                  [](cplx z) -> cplx {
                                    if (z.real() < 0.0)
                                      throw DomainError("sqrt of a negative eigenvalue");
                                    return std::sqrt(z.real());
                                  }),
                  DomainError);
}

TEST_CASE("eig_unitary handles degenerate clusters") {
  // U = -I has a doubly degenerate eigenvalue
  const UnitaryOperator u(ComplexMatrix::identity(3) * cplx{-1.0, 0.0});
  const SpectralDecomposition s = eig_unitary(u);
  const ComplexMatrix gram = s.eigenvectors.adjoint() * s.eigenvectors;
  CHECK(max_abs_diff(gram, ComplexMatrix::identity(3)) <= tol::kOrthonormal);
  for (const double ph : s.phases()) CHECK(ph == doctest::Approx(M_PI));
}

TEST_CASE("operator_2norm matches known values") {
  CHECK(operator_2norm(ComplexMatrix::square(2, {3, 0, 0, -5})) ==
        doctest::Approx(5.0).epsilon(1e-12));
  // nilpotent shift: norm 1
  CHECK(operator_2norm(ComplexMatrix::square(2, {0, 1, 0, 0})) ==
        doctest::Approx(1.0).epsilon(1e-12));
}
