#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "opstat/errors.hpp"
#include "opstat/holevo.hpp"
#include "support/bloch_oracle.hpp"

using namespace opstat;
using namespace opstat::testsupport;

namespace {

OptimizerConfig fast_opt(std::uint64_t seed, int restarts = 6) {
  OptimizerConfig opt;
  opt.restarts = restarts;
  opt.max_iters = 200;
  opt.tolerance = 1e-5;
  opt.seed = seed;
  return opt;
}

constexpr double kDep05Capacity = 0.18872187554086717;  // 1 - h2(1/4)

}  // namespace

TEST_CASE("capacity of the identity qubit channel is 1 bit") {
  const CapacityResult r = holevo_capacity(QuantumChannel::identity(2), fast_opt(1));
  CHECK(r.converged);
  CHECK(std::fabs(r.bits - 1.0) <= 1e-4);
}

TEST_CASE("capacity of the completely depolarizing channel is 0") {
  const CapacityResult r =
      holevo_capacity(QuantumChannel::completely_depolarizing(2), fast_opt(2));
  CHECK(r.bits <= 1e-6);
}

TEST_CASE("depolarizing(0.5) capacity matches the Bloch grid oracle") {
  const QuantumChannel dep = QuantumChannel::depolarizing(0.5);
  const CapacityResult r = holevo_capacity(dep, fast_opt(3));
  CHECK(r.converged);
  // grid oracle over two-state ensembles (covariant reduction)
  const double oracle = capacity_two_state_grid(dep, 180, 50);
  CHECK(std::fabs(r.bits - oracle) <= 1e-3);
  // and the literature closed form
  CHECK(std::fabs(r.bits - kDep05Capacity) <= 1e-6);
}

TEST_CASE("optimizer soundness: never below a hand-built feasible ensemble") {
  for (int rep = 0; rep < 5; ++rep) {
    const QuantumChannel ch = random_channel(2, 2, 4200 + rep);
    const Ensemble basis({0.5, 0.5}, {DensityMatrix::pure({1.0, 0.0}),
                                      DensityMatrix::pure({0.0, 1.0})});
    const double feasible = holevo_chi(ch, basis);
    const CapacityResult r = holevo_capacity(ch, fast_opt(4300 + rep, 4));
    CHECK(r.bits >= feasible - 1e-9);
    // chi upper bound
    CHECK(r.bits <= 1.0 + 1e-9);
  }
}

TEST_CASE("capacity argmax ensemble reproduces the reported value") {
  const QuantumChannel ch = random_channel(2, 2, 77);
  const CapacityResult r = holevo_capacity(ch, fast_opt(5));
  const double chi = holevo_chi(ch, r.to_ensemble());
  CHECK(std::fabs(chi - r.bits) <= 1e-9);
}

TEST_CASE("minimum output entropy: identity, depolarizing, dephasing") {
  const MinEntropyResult id = min_output_entropy(QuantumChannel::identity(2), fast_opt(6));
  CHECK(id.bits <= 1e-6);

  const MinEntropyResult dep =
      min_output_entropy(QuantumChannel::completely_depolarizing(2), fast_opt(7));
  CHECK(std::fabs(dep.bits - 1.0) <= 1e-9);

  const QuantumChannel deph = QuantumChannel::dephasing(0.5);
  const MinEntropyResult r = min_output_entropy(deph, fast_opt(8));
  const double oracle = moe_bloch_grid(deph, 100, 100);  // poles included
  CHECK(oracle <= 1e-12);  // basis states pass dephasing unchanged
  CHECK(std::fabs(r.bits - oracle) <= 1e-4);
}

TEST_CASE("additivity: identity (x) identity achieves 2 bits") {
  const AdditivityReport r = additivity_experiment(
      QuantumChannel::identity(2), QuantumChannel::identity(2), fast_opt(9));
  CHECK(std::fabs(r.chi_joint - 2.0) <= 1e-3);
  CHECK(std::fabs(r.defect) <= 3.0 * r.optimizer_tolerance);
  CHECK(r.verdict == Verdict::kAdditiveWithinTolerance);
}

TEST_CASE("additivity: depolarizing(0.5) pair reproduces the literature value") {
  const QuantumChannel dep = QuantumChannel::depolarizing(0.5);
  const AdditivityReport r = additivity_experiment(dep, dep, fast_opt(10));
  CHECK(std::fabs(r.chi_1 - kDep05Capacity) <= 1e-5);
  CHECK(std::fabs(r.chi_2 - kDep05Capacity) <= 1e-5);
  CHECK(std::fabs(r.defect) <= 3e-4);
  CHECK_FALSE(r.floor_violated);
  CHECK(r.verdict == Verdict::kAdditiveWithinTolerance);
}

TEST_CASE("additivity: any channel paired with the completely depolarizing one") {
  const AdditivityReport r = additivity_experiment(
      random_channel(2, 2, 11), QuantumChannel::completely_depolarizing(2),
      fast_opt(12));
  CHECK(std::fabs(r.chi_2) <= 1e-6);
  CHECK(std::fabs(r.defect) <= 3.0 * r.optimizer_tolerance);
}

TEST_CASE("superadditivity floor holds on random pairs") {
  for (int rep = 0; rep < 3; ++rep) {
    const AdditivityReport r = additivity_experiment(
        random_channel(2, 2, 500 + rep), random_channel(2, 3, 600 + rep),
        fast_opt(700 + rep, 4));
    CHECK(r.defect >= -2.0 * r.optimizer_tolerance);
    CHECK(r.verdict == Verdict::kAdditiveWithinTolerance);
  }
}

TEST_CASE("desk-scale guard rejects oversized joint problems") {
  CHECK_THROWS_AS(additivity_experiment(random_channel(8, 1, 1),
                                        random_channel(4, 1, 2), fast_opt(13)),
                  ValidationError);
}

TEST_CASE("optimizer config validation") {
  OptimizerConfig bad = fast_opt(1);
  bad.restarts = 0;
  CHECK_THROWS_AS(holevo_capacity(QuantumChannel::identity(2), bad), ValidationError);
  bad = fast_opt(1);
  bad.tolerance = 0.0;
  CHECK_THROWS_AS(holevo_capacity(QuantumChannel::identity(2), bad), ValidationError);
}
