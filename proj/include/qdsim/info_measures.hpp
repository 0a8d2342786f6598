#pragma once

#include <optional>
#include <vector>

#include "qdsim/states.hpp"

namespace qdsim {

enum class EntropyUnit { Bits, Nats };

inline double log_base(EntropyUnit u) {
  return u == EntropyUnit::Bits ? 0.6931471805599453094172321214581766 : 1.0;  // ln 2 or 1
}

// -sum p log p in the requested unit; entries below 1e-12 contribute zero,
// small negative eigenvalue noise in [-1e-10, 0) is clipped
double shannon_entropy(const std::vector<double>& p, EntropyUnit unit);

// Rank-1 projective measurement on one subsystem: orthonormal columns that
// sum to the identity on that factor.
class MeasurementBasis {
 public:
  MeasurementBasis(Matrix vectors, int subsystem);

  const Matrix& vectors() const { return vectors_; }
  int subsystem() const { return subsystem_; }
  int outcome_count() const { return static_cast<int>(vectors_.cols()); }

 private:
  Matrix vectors_;  // columns are the projector vectors
  int subsystem_;
};

double von_neumann_entropy(const DensityMatrix& rho, EntropyUnit unit);

// outcome probabilities p_k = <pi_k| rho_marginal |pi_k>
std::vector<double> measurement_probabilities(const DensityMatrix& rho,
                                              const MeasurementBasis& basis);

double shannon_entropy_of_measurement(const DensityMatrix& rho,
                                      const MeasurementBasis& basis, EntropyUnit unit);

// I(left : rest) = H(left) + H(rest) - H(joint); `cut` lists the left side
double mutual_information(const DensityMatrix& rho, const std::vector<int>& cut,
                          EntropyUnit unit);

// H(rest | {basis outcomes}) = sum_k p_k H(rho_rest|k); outcomes with
// p_k < 1e-12 are skipped
double conditional_entropy_given_measurement(const DensityMatrix& rho,
                                             const MeasurementBasis& basis,
                                             EntropyUnit unit);

// classical mutual information of the joint outcome distribution of two
// measurements on distinct subsystems
double observable_mutual_information(const DensityMatrix& rho, const MeasurementBasis& basis_s,
                                     const MeasurementBasis& basis_a, EntropyUnit unit);

// J(rest : {A_k}) = H(rest) - H(rest | {A_k})
double measured_mutual_information(const DensityMatrix& rho, const MeasurementBasis& basis,
                                   EntropyUnit unit);

// discord of the given one-sided measurement: I - J
double quantum_discord(const DensityMatrix& rho, const MeasurementBasis& basis,
                       EntropyUnit unit);

struct DiscordMinimum {
  double discord;
  MeasurementBasis basis;  // minimizing projective basis
};

// Minimum discord over rank-1 projective measurements on `side` (a subsystem
// of dimension <= 2): Bloch-sphere grid search plus local refinement.
DiscordMinimum min_discord(const DensityMatrix& rho, int side, EntropyUnit unit);

// eigenbasis of a Hermitian observable on `subsystem`, as a MeasurementBasis
MeasurementBasis eigenbasis_of(const Matrix& observable, int subsystem);

}  // namespace qdsim
