#pragma once

#include <string_view>
#include <vector>

#include "opstat/channel.hpp"

namespace opstat {

struct OptimizerConfig {
  int ensemble_size = 0;    // 0 means dim_in^2
  int restarts = 16;
  int max_iters = 300;
  double tolerance = 1e-5;  // bits; drives additivity verdicts
  std::uint64_t seed = 0;
};

// Working representation of a pure-state ensemble (extreme points suffice:
// chi is convex in each state).
struct PureEnsemble {
  std::vector<double> probs;
  std::vector<std::vector<cplx>> states;  // unit vectors
};

struct CapacityResult {
  double bits = 0.0;
  bool converged = false;
  int iterations = 0;  // iterations used by the winning restart
  PureEnsemble argmax;

  Ensemble to_ensemble() const;
};

// One-shot Holevo capacity by multi-restart ascent: Blahut-Arimoto updates
// on the probabilities alternate with Frank-Wolfe steps on the pure states
// (top eigenvector of the relative-entropy gradient, with backtracking).
// Ascent is monotone; a restart that stalls before max_iters counts as
// converged. Restart 0 starts from the computational basis.
CapacityResult holevo_capacity(const QuantumChannel& ch,
                               const OptimizerConfig& opt);
CapacityResult holevo_capacity(const QuantumChannel& ch,
                               const OptimizerConfig& opt,
                               const std::vector<PureEnsemble>& extra_inits);

struct MinEntropyResult {
  double bits = 0.0;
  bool converged = false;
  std::vector<cplx> argmin;
};

// Minimum output entropy over pure inputs, same descent machinery.
MinEntropyResult min_output_entropy(const QuantumChannel& ch,
                                    const OptimizerConfig& opt);

enum class Verdict {
  kAdditiveWithinTolerance,
  kSuperadditiveSignal,
  kInconclusive,
};

std::string_view verdict_name(Verdict v);

struct AdditivityReport {
  double chi_1 = 0.0;
  double chi_2 = 0.0;
  double chi_joint = 0.0;
  double defect = 0.0;  // chi_joint - chi_1 - chi_2
  double optimizer_tolerance = 0.0;
  Verdict verdict = Verdict::kInconclusive;
  bool floor_violated = false;  // defect < -2 * tolerance (optimizer bug signal)
};

// Capacities of a, b and of a (x) b with entangled input ensembles admitted;
// the joint run additionally starts from the product of the factor optima,
// which keeps the superadditivity floor defect >= -2*tolerance honest.
AdditivityReport additivity_experiment(const QuantumChannel& a,
                                       const QuantumChannel& b,
                                       const OptimizerConfig& opt);

}  // namespace opstat
