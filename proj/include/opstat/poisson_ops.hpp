#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opstat/operator_core.hpp"

namespace opstat {

// Scalar Poisson process configuration. The paper-side intensity is implicit;
// here it is an explicit parameter.
struct PoissonConfig {
  double rate = 1.0;     // events per unit time, > 0
  double horizon = 1.0;  // observation window, > 0
  std::uint64_t seed = 0;

  void validate() const;
};

// One sample path: strictly increasing jump times in (0, horizon].
struct JumpPath {
  std::vector<double> jump_times;
  std::size_t count() const { return jump_times.size(); }
};

// Atomic spectral measure mu_h: atoms (theta_k, |<v_k, h>|^2).
struct DiscreteMeasure {
  struct Atom {
    double theta;
    double weight;
  };
  std::vector<Atom> atoms;

  double total_weight() const;
};

// Jump times by exponential inter-arrival sampling; deterministic per config.
JumpPath sample_poisson_path(const PoissonConfig& cfg);

// exp(rate * t * (U - I)): the compound-Poisson average of powers of U,
// evaluated through the spectral decomposition.
ComplexMatrix poisson_semigroup(const UnitaryOperator& u, double rate, double t);
ComplexMatrix poisson_semigroup(const SpectralDecomposition& s, double rate, double t);

// Truncated Poisson-weighted power series sum_{n=0}^{terms} e^{-rt}(rt)^n/n! U^n.
// The independent cross-check for the closed form above.
ComplexMatrix poisson_semigroup_series(const UnitaryOperator& u, double rate,
                                       double t, int terms);

// Spectral measure of U generated by the vector h; weights sum to ||h||^2.
DiscreteMeasure spectral_measure(const UnitaryOperator& u, const std::vector<cplx>& h);
DiscreteMeasure spectral_measure(const SpectralDecomposition& s, const std::vector<cplx>& h);

// Projection-valued Poisson path: at each jump time of the sampled scalar
// path, a partition cell is drawn with probability rank(P_j)/dim and its
// projector emitted.
struct ProjectionPoissonPath {
  std::vector<double> times;
  std::vector<int> cells;                         // index into cell_projectors
  std::vector<ProjectionOperator> cell_projectors;  // one per partition cell

  std::size_t count() const { return times.size(); }
  const ProjectionOperator& projector_at(std::size_t k) const {
    return cell_projectors[static_cast<std::size_t>(cells[k])];
  }
};

ProjectionPoissonPath projection_poisson_path(const UnitaryOperator& u,
                                              const std::vector<BorelArc>& partition,
                                              const PoissonConfig& cfg);

// Monte-Carlo certification of finite additivity of the PVM: each trial
// draws a random sub-collection of partition cells and compares the directly
// constructed projector of the union against the sum of cell projectors in
// operator norm.
struct SigmaAdditivityReport {
  int trials = 0;
  std::vector<double> defects;
  double max_defect = 0.0;
  double pass_fraction = 0.0;

  std::string to_json() const;
};

SigmaAdditivityReport sigma_additivity_test(const UnitaryOperator& u,
                                            const std::vector<BorelArc>& partition,
                                            int trials, const PoissonConfig& cfg);

}  // namespace opstat
