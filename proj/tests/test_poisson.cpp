#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "opstat/errors.hpp"
#include "opstat/poisson_ops.hpp"
#include "opstat/random_ops.hpp"
#include "opstat/rng.hpp"
#include "opstat/tolerances.hpp"

using namespace opstat;

namespace {
const cplx I{0.0, 1.0};
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

TEST_CASE("poisson path: determinism, ordering, vanishing window") {
  const PoissonConfig cfg{1.0, 1.0, 42};
  const JumpPath a = sample_poisson_path(cfg);
  const JumpPath b = sample_poisson_path(cfg);
  CHECK(a.jump_times == b.jump_times);  // bit-identical

  for (std::size_t k = 0; k + 1 < a.jump_times.size(); ++k)
    CHECK(a.jump_times[k] < a.jump_times[k + 1]);
  for (const double t : a.jump_times) {
    CHECK(t > 0.0);
    CHECK(t <= cfg.horizon);
  }

  int nonzero = 0;
  for (std::uint64_t s = 0; s < 2000; ++s) {
    const PoissonConfig tiny{1.0, 1e-9, s};
    nonzero += sample_poisson_path(tiny).count() > 0 ? 1 : 0;
  }
  CHECK(nonzero == 0);

  CHECK_THROWS_AS(sample_poisson_path(PoissonConfig{0.0, 1.0, 1}), ValidationError);
  CHECK_THROWS_AS(sample_poisson_path(PoissonConfig{1.0, -1.0, 1}), ValidationError);
}

TEST_CASE("poisson count statistics over 10^4 seeds") {
  const double rate = 5.0, horizon = 10.0;
  const double lambda = rate * horizon;
  const int n = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < n; ++s) {
    const PoissonConfig cfg{rate, horizon, static_cast<std::uint64_t>(s)};
    const double c = static_cast<double>(sample_poisson_path(cfg).count());
    sum += c;
    sum_sq += c * c;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  // mean within 3 sigma: sigma = sqrt(lambda / n)
  CHECK(std::fabs(mean - lambda) <= 3.0 * std::sqrt(lambda / n));
  // variance within 3 standard errors: Var(s^2) ~ (lambda + 2 lambda^2)/n
  CHECK(std::fabs(var - lambda) <=
        3.0 * std::sqrt((lambda + 2.0 * lambda * lambda) / n));
}

TEST_CASE("poisson semigroup: t = 0, U = I, diagonal closed form") {
  const UnitaryOperator u = cayley_transform(random_hermitian(4, 11, 5.0));
  CHECK(max_abs_diff(poisson_semigroup(u, 1.5, 0.0), ComplexMatrix::identity(4)) <
        1e-12);

  const UnitaryOperator id(ComplexMatrix::identity(3));
  CHECK(max_abs_diff(poisson_semigroup(id, 2.0, 3.0), ComplexMatrix::identity(3)) <
        1e-12);

  // U = diag(e^{i theta}): output diag(e^{rt(e^{i theta} - 1)})
  const double theta = 1.1, rate = 0.8, t = 1.7;
  const UnitaryOperator diag(
      ComplexMatrix::square(2, {std::exp(I * theta), 0, 0, std::exp(I * 2.2)}));
  const ComplexMatrix p = poisson_semigroup(diag, rate, t);
  const cplx expect00 = std::exp(rate * t * (std::exp(I * theta) - 1.0));
  const cplx expect11 = std::exp(rate * t * (std::exp(I * 2.2) - 1.0));
  CHECK(std::abs(p(0, 0) - expect00) < 1e-12);
  CHECK(std::abs(p(1, 1) - expect11) < 1e-12);
  CHECK(std::abs(p(0, 1)) < 1e-12);

  // cross-check against the truncated Poisson-weighted series
  CHECK(max_abs_diff(p, poisson_semigroup_series(diag, rate, t, 40)) <= 1e-10);
}

TEST_CASE("semigroup law, contraction and series consistency randomized") {
  Philox gen(5);
  for (int rep = 0; rep < 20; ++rep) {
    const int dim = 2 + rep % 5;
    const UnitaryOperator u = cayley_transform(random_hermitian(dim, 600 + rep, 8.0));
    const SpectralDecomposition s = eig_unitary(u);
    const double rate = 0.1 + 4.9 * gen.next_double();
    const double t1 = 2.0 * gen.next_double();
    const double t2 = 2.0 * gen.next_double();

    const ComplexMatrix lhs = poisson_semigroup(s, rate, t1) * poisson_semigroup(s, rate, t2);
    CHECK(max_abs_diff(lhs, poisson_semigroup(s, rate, t1 + t2)) <= 1e-9);

    CHECK(operator_2norm(poisson_semigroup(s, rate, t1)) <= 1.0 + 1e-10);

    if (rate * t1 <= 2.0)
      CHECK(max_abs_diff(poisson_semigroup_series(u, rate, t1, 40),
                         poisson_semigroup(s, rate, t1)) <= 1e-10);
  }
}

TEST_CASE("spectral measure: eigenvector atom, uniform split, completeness") {
  const UnitaryOperator u(ComplexMatrix::square(2, {-I, 0, 0, I}));
  const SpectralDecomposition s = eig_unitary(u);

  // h = eigenvector -> a single effective atom carrying ||h||^2
  const std::vector<cplx> e1{0.0, 2.0};  // eigenvector scaled by 2
  const DiscreteMeasure mu1 = spectral_measure(s, e1);
  CHECK(mu1.total_weight() == doctest::Approx(4.0).epsilon(1e-12));
  double max_atom = 0.0;
  for (const auto& atom : mu1.atoms) max_atom = std::max(max_atom, atom.weight);
  CHECK(max_atom == doctest::Approx(4.0).epsilon(1e-12));

  // h = (1,1)/sqrt(2) -> atoms (3pi/2, 1/2) and (pi/2, 1/2)
  const std::vector<cplx> plus{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  const DiscreteMeasure mu2 = spectral_measure(s, plus);
  REQUIRE(mu2.atoms.size() == 2);
  // atoms sorted by phase: pi/2 first, then 3pi/2
  CHECK(mu2.atoms[0].theta == doctest::Approx(M_PI / 2).epsilon(1e-12));
  CHECK(mu2.atoms[0].weight == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mu2.atoms[1].theta == doctest::Approx(3 * M_PI / 2).epsilon(1e-12));
  CHECK(mu2.atoms[1].weight == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(spectral_measure(s, std::vector<cplx>{0.0, 0.0}), ValidationError);
}

TEST_CASE("spectral measure reproduces quadratic forms") {
  Philox gen(9);
  for (int rep = 0; rep < 10; ++rep) {
    const int dim = 2 + rep % 5;
    const UnitaryOperator u = cayley_transform(random_hermitian(dim, 700 + rep, 6.0));
    const SpectralDecomposition s = eig_unitary(u);
    std::vector<cplx> h(dim);
    for (auto& z : h) z = cplx{gen.next_normal(), gen.next_normal()};

    const DiscreteMeasure mu = spectral_measure(s, h);
    const double rate = 1.3, t = 0.7;

    // f = 1, f = e^{i theta}, f = the Poisson kernel
    cplx f_id = 0.0, f_u = 0.0, f_poisson = 0.0;
    for (const auto& atom : mu.atoms) {
      const cplx ev = std::exp(I * atom.theta);
      f_id += atom.weight;
      f_u += atom.weight * ev;
      f_poisson += atom.weight * std::exp(rate * t * (ev - 1.0));
    }
    const double h2 = vec_norm(h) * vec_norm(h);
    CHECK(std::abs(f_id - h2) <= 1e-9 * std::max(1.0, h2));
    CHECK(std::abs(f_u - vdot(h, matvec(u.matrix(), h))) <= 1e-9 * std::max(1.0, h2));
    CHECK(std::abs(f_poisson -
                   vdot(h, matvec(poisson_semigroup(s, rate, t), h))) <=
          1e-9 * std::max(1.0, h2));
  }
}

TEST_CASE("projection-valued poisson path") {
  const UnitaryOperator u(ComplexMatrix::square(2, {-I, 0, 0, I}));
  const PoissonConfig cfg{3.0, 4.0, 7};

  // single-cell partition: every emitted projector is the identity
  const auto single = projection_poisson_path(u, {BorelArc(0.0, kTwoPi)}, cfg);
  for (std::size_t k = 0; k < single.count(); ++k) {
    CHECK(single.cells[k] == 0);
    CHECK(max_abs_diff(single.projector_at(k).matrix(), ComplexMatrix::identity(2)) <
          1e-12);
  }

  // zero jumps -> empty path
  const PoissonConfig tiny{1.0, 1e-12, 3};
  CHECK(projection_poisson_path(u, {BorelArc(0.0, kTwoPi)}, tiny).count() == 0);

  // two half circles, rank 1 each: frequencies ~ (1/2, 1/2) within 3 sigma
  const std::vector<BorelArc> halves{BorelArc(0.0, M_PI), BorelArc(M_PI, kTwoPi)};
  std::int64_t jumps = 0, first_cell = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const PoissonConfig big{100.0, 1.0, s};
    const auto path = projection_poisson_path(u, halves, big);
    jumps += static_cast<std::int64_t>(path.count());
    for (const int c : path.cells) first_cell += (c == 0);
  }
  CHECK(jumps > 5000);
  const double freq = static_cast<double>(first_cell) / jumps;
  CHECK(std::fabs(freq - 0.5) <= 3.0 * 0.5 / std::sqrt(static_cast<double>(jumps)));
}

TEST_CASE("sigma additivity certification") {
  // trivially additive on a 2-dim operator, 100 trials
  const UnitaryOperator u(ComplexMatrix::square(2, {-I, 0, 0, I}));
  const PoissonConfig cfg{1.0, 1.0, 13};
  const auto small = sigma_additivity_test(u, equal_partition(4), 100, cfg);
  CHECK(small.trials == 100);
  CHECK(small.pass_fraction == 1.0);
  CHECK(small.max_defect <= tol::kAdditivity);

  // single cell: defect identically zero
  const auto one = sigma_additivity_test(u, {BorelArc(0.0, kTwoPi)}, 50, cfg);
  CHECK(one.max_defect == 0.0);

  // 16 random cells on a random 8-dim unitary, 1000 trials
  const UnitaryOperator big = cayley_transform(random_hermitian(8, 99, 10.0));
  Philox arc_gen(3);
  std::vector<double> cuts{0.0, kTwoPi};
  for (int c = 0; c < 15; ++c) cuts.push_back(arc_gen.next_double() * kTwoPi);
  std::sort(cuts.begin(), cuts.end());
  std::vector<BorelArc> arcs;
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j)
    if (cuts[j + 1] > cuts[j]) arcs.emplace_back(cuts[j], cuts[j + 1]);
  const auto report = sigma_additivity_test(big, arcs, 1000, cfg);
  CHECK(report.pass_fraction == 1.0);

  // the report serializes with the spec's keys
  const std::string json = report.to_json();
  CHECK(json.find("\"trials\"") != std::string::npos);
  CHECK(json.find("\"max_defect\"") != std::string::npos);
  CHECK(json.find("\"pass_fraction\"") != std::string::npos);
  CHECK(json.find("\"defects\"") != std::string::npos);
}
