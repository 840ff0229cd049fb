#pragma once

#include <cstdint>
#include <vector>

#include "opstat/complex_matrix.hpp"

namespace opstat {

// Quantum state: Hermitian, unit trace, positive semidefinite (eigenvalues
// above -1e-10; the construction check does the eigendecomposition).
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m);
  const ComplexMatrix& matrix() const { return m_; }
  int dim() const { return m_.rows(); }

  static DensityMatrix pure(const std::vector<cplx>& psi);
  static DensityMatrix maximally_mixed(int n);

 private:
  ComplexMatrix m_;
};

// CPTP map in Kraus form; trace preservation enforced at construction.
class QuantumChannel {
 public:
  QuantumChannel(int dim_in, int dim_out, std::vector<ComplexMatrix> kraus);

  int dim_in() const { return dim_in_; }
  int dim_out() const { return dim_out_; }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }

  static QuantumChannel identity(int n);
  // rho -> (1-p) rho + p I/2 on a qubit, 0 <= p <= 1 (Kraus: Pauli mixture)
  static QuantumChannel depolarizing(double p);
  // rho -> tr(rho) I/n
  static QuantumChannel completely_depolarizing(int n);
  // {sqrt(1-p) I, sqrt(p) Z} on a qubit
  static QuantumChannel dephasing(double p);

 private:
  int dim_in_;
  int dim_out_;
  std::vector<ComplexMatrix> kraus_;
};

// Probability-weighted list of states (the signal ensemble).
struct Ensemble {
  std::vector<double> probs;
  std::vector<DensityMatrix> states;

  Ensemble(std::vector<double> p, std::vector<DensityMatrix> s);
  std::size_t size() const { return probs.size(); }
};

// sum_i K_i rho K_i^dagger
DensityMatrix apply_channel(const QuantumChannel& ch, const DensityMatrix& rho);

// -sum_k lambda_k log2 lambda_k in bits; eigenvalues in [-1e-10, 0) clamp to 0.
double von_neumann_entropy(const DensityMatrix& rho);

// S(sum p_i ch(rho_i)) - sum p_i S(ch(rho_i)), in bits.
double holevo_chi(const QuantumChannel& ch, const Ensemble& ens);

// Kraus set {A_i (x) B_j}.
QuantumChannel tensor_channel(const QuantumChannel& a, const QuantumChannel& b);

DensityMatrix tensor_state(const DensityMatrix& a, const DensityMatrix& b);

// Haar-random isometry dim -> dim * kraus_count, sliced into Kraus blocks.
// Deterministic per seed.
QuantumChannel random_channel(int dim, int kraus_count, std::uint64_t seed);

}  // namespace opstat
