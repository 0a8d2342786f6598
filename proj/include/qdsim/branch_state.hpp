#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qdsim/info_measures.hpp"
#include "qdsim/states.hpp"

namespace qdsim {

using Qubit = Eigen::Vector2cd;

// Two-branch product-form state
//   a |0> (x)_k |eps_k^0>  +  b |1> (x)_k |eps_k^1>
// Conditional single-qubit states need not be orthogonal, so n_env ~ 50+ is
// tractable: every reduced quantity lives in the 2d span of the two branches.
class BranchState {
 public:
  BranchState(Complex a, Complex b, std::vector<std::array<Qubit, 2>> conditionals);

  Complex a() const { return a_; }
  Complex b() const { return b_; }
  int n_env() const { return static_cast<int>(cond_.size()); }
  const Qubit& conditional(int spin, int branch) const {
    return cond_[static_cast<std::size_t>(spin)][static_cast<std::size_t>(branch)];
  }
  // <eps_k^1 | eps_k^0>
  Complex overlap(int spin) const;

  // dense amplitudes over qubits (S, E_1, ..., E_N); n_env small enough for cap
  PureState to_dense(std::int64_t cap = kDefaultDimensionCap) const;

 private:
  Complex a_, b_;
  std::vector<std::array<Qubit, 2>> cond_;
};

struct CentralSpinModel {
  std::vector<double> couplings;       // g_k > 0
  Complex a{1.0 / 1.4142135623730951, 0.0};
  Complex b{1.0 / 1.4142135623730951, 0.0};
  std::vector<Qubit> env_initial;      // per spin; empty means all |0>

  int n_env() const { return static_cast<int>(couplings.size()); }
  double average_action(double t) const;  // <g_k t>

  // couplings drawn uniformly in (0, 1]
  static CentralSpinModel random_couplings(int n, std::uint64_t seed, Complex a, Complex b);
};

// Analytic state under H = sum_k g_k sigma_z^S (x) sigma_y^{E_k}: branch 0
// conditionals rotate by exp(-i g_k t sigma_y), branch 1 by exp(+i g_k t sigma_y).
BranchState central_spin_state_at(const CentralSpinModel& model, double t);

// Gamma = prod_{k in excluded} <eps_k^1 | eps_k^0>
Complex decoherence_factor(const BranchState& state, const std::vector<int>& excluded);

// rho of (S if include_system) + fragment, exact rank <= 2; the cross term is
// weighted by the decoherence factor over the complement spins
DensityMatrix reduced_joint_density(const BranchState& state, const std::vector<int>& fragment,
                                    bool include_system,
                                    std::int64_t cap = kDefaultDimensionCap);

// ---- closed-form entropies (any n_env; no dense matrices) ----

// eigenvalues of A|v0><v0| + B|v1><v1| + C|v0><v1| + conj(C)|v1><v0|
// for normalized v0, v1 with s = <v0|v1>; at most two nonzero
std::array<double, 2> rank_two_spectrum(double w0, double w1, Complex cross, Complex s);

double branch_entropy_system(const BranchState& state, EntropyUnit unit);
double branch_entropy_fragment(const BranchState& state, const std::vector<int>& fragment,
                               EntropyUnit unit);
double branch_entropy_joint(const BranchState& state, const std::vector<int>& fragment,
                            EntropyUnit unit);
// I(S : F) = H(S) + H(F) - H(S,F)
double branch_mutual_information(const BranchState& state, const std::vector<int>& fragment,
                                 EntropyUnit unit);

}  // namespace qdsim
