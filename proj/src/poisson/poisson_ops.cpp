#include "opstat/poisson_ops.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include <json.hpp>

#include "opstat/errors.hpp"
#include "opstat/parallel.hpp"
#include "opstat/rng.hpp"
#include "opstat/tolerances.hpp"

namespace opstat {

void PoissonConfig::validate() const {
  if (!(rate > 0.0)) throw ValidationError("Poisson rate must be > 0");
  if (!(horizon > 0.0)) throw ValidationError("Poisson horizon must be > 0");
}

double DiscreteMeasure::total_weight() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight;
  return s;
}

JumpPath sample_poisson_path(const PoissonConfig& cfg) {
  cfg.validate();
  Philox gen(cfg.seed, stream_id(Stream::kPoissonJumps));
  JumpPath path;
  double t = 0.0;
  for (;;) {
    t += gen.next_exponential(cfg.rate);
    if (t > cfg.horizon) break;
    path.jump_times.push_back(t);
  }
  return path;
}

ComplexMatrix poisson_semigroup(const SpectralDecomposition& s, double rate,
                                double t) {
  if (!(rate > 0.0)) throw ValidationError("semigroup rate must be > 0");
  if (!(t >= 0.0)) throw ValidationError("semigroup time must be >= 0");
  const double rt = rate * t;
  return matrix_function(
      s, [rt](cplx lambda) { return std::exp(rt * (lambda - 1.0)); });
}

ComplexMatrix poisson_semigroup(const UnitaryOperator& u, double rate, double t) {
  return poisson_semigroup(eig_unitary(u), rate, t);
}

ComplexMatrix poisson_semigroup_series(const UnitaryOperator& u, double rate,
                                       double t, int terms) {
  if (!(rate > 0.0)) throw ValidationError("semigroup rate must be > 0");
  if (!(t >= 0.0)) throw ValidationError("semigroup time must be >= 0");
  if (terms < 0) throw ValidationError("series needs >= 0 terms");
  const int n = u.dim();
  const double rt = rate * t;
  double coeff = std::exp(-rt);  // e^{-rt} (rt)^k / k!
  ComplexMatrix power = ComplexMatrix::identity(n);
  ComplexMatrix acc = power * cplx{coeff, 0.0};
  for (int k = 1; k <= terms; ++k) {
    power = power * u.matrix();
    coeff *= rt / k;
    acc += power * cplx{coeff, 0.0};
  }
  return acc;
}

DiscreteMeasure spectral_measure(const SpectralDecomposition& s,
                                 const std::vector<cplx>& h) {
  if (h.size() != static_cast<std::size_t>(s.dim()))
    throw ValidationError("vector dimension does not match the operator");
  const double hnorm = vec_norm(h);
  if (hnorm == 0.0) throw ValidationError("spectral measure of the zero vector");

  DiscreteMeasure mu;
  mu.atoms.reserve(s.eigenvalues.size());
  const std::vector<double> ph = s.phases();
  for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
    cplx amp = 0.0;
    for (int i = 0; i < s.dim(); ++i)
      amp += std::conj(s.eigenvectors(i, static_cast<int>(k))) * h[i];
    mu.atoms.push_back({ph[k], std::norm(amp)});
  }

  const double defect = std::fabs(mu.total_weight() - hnorm * hnorm);
  if (defect > tol::kCompleteness * std::max(1.0, hnorm * hnorm)) {
    std::ostringstream msg;
    msg << "spectral measure weights do not sum to ||h||^2 (defect " << defect
        << ")";
    throw NumericError(msg.str());
  }
  return mu;
}

DiscreteMeasure spectral_measure(const UnitaryOperator& u,
                                 const std::vector<cplx>& h) {
  return spectral_measure(eig_unitary(u), h);
}

ProjectionPoissonPath projection_poisson_path(const UnitaryOperator& u,
                                              const std::vector<BorelArc>& partition,
                                              const PoissonConfig& cfg) {
  cfg.validate();
  const SpectralDecomposition s = eig_unitary(u);
  ProjectionPoissonPath path;
  path.cell_projectors = resolution_of_identity(s, partition);

  std::vector<double> cumulative(path.cell_projectors.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < path.cell_projectors.size(); ++j) {
    acc += static_cast<double>(path.cell_projectors[j].rank()) / u.dim();
    cumulative[j] = acc;
  }

  const JumpPath jumps = sample_poisson_path(cfg);
  Philox cells(cfg.seed, stream_id(Stream::kPoissonCells));
  path.times = jumps.jump_times;
  path.cells.reserve(path.times.size());
  for (std::size_t k = 0; k < path.times.size(); ++k)
    path.cells.push_back(static_cast<int>(cells.next_categorical(cumulative)));
  return path;
}

SigmaAdditivityReport sigma_additivity_test(const UnitaryOperator& u,
                                            const std::vector<BorelArc>& partition,
                                            int trials, const PoissonConfig& cfg) {
  if (trials < 1) throw ValidationError("additivity test needs >= 1 trial");
  cfg.validate();
  const SpectralDecomposition s = eig_unitary(u);
  const std::vector<ProjectionOperator> projectors =
      resolution_of_identity(s, partition);
  const std::vector<double> ph = s.phases();
  const int n = s.dim();

  SigmaAdditivityReport report;
  report.trials = trials;
  report.defects.assign(static_cast<std::size_t>(trials), 0.0);

  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t trial) {
    Philox gen(cfg.seed, stream_id(Stream::kSigmaTrial, trial));
    std::vector<std::uint8_t> pick(partition.size());
    for (auto& b : pick) b = gen.next_double() < 0.5 ? 1 : 0;

    // Direct construction: one projector for the union of the chosen arcs.
    std::vector<int> selected;
    for (int k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < partition.size(); ++j) {
        if (pick[j] && partition[j].contains(ph[k])) {
          selected.push_back(k);
          break;
        }
      }
    }
    ComplexMatrix union_proj = ComplexMatrix::zero(n);
    if (!selected.empty()) {
      ComplexMatrix w(n, static_cast<int>(selected.size()));
      for (std::size_t j = 0; j < selected.size(); ++j)
        for (int i = 0; i < n; ++i)
          w(i, static_cast<int>(j)) = s.eigenvectors(i, selected[j]);
      union_proj = gram_outer(w);
    }

    ComplexMatrix sum = ComplexMatrix::zero(n);
    for (std::size_t j = 0; j < partition.size(); ++j)
      if (pick[j]) sum += projectors[j].matrix();

    report.defects[trial] = operator_2norm(union_proj - sum);
  });

  int passed = 0;
  for (const double d : report.defects) {
    if (d > report.max_defect) report.max_defect = d;
    if (d <= tol::kAdditivity) ++passed;
  }
  report.pass_fraction = static_cast<double>(passed) / trials;
  return report;
}

std::string SigmaAdditivityReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["trials"] = trials;
  doc["max_defect"] = max_defect;
  doc["pass_fraction"] = pass_fraction;
  doc["defects"] = defects;
  return doc.dump(2);
}

}  // namespace opstat
