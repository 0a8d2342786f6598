#pragma once

#include "qdsim/branch_state.hpp"
#include "qdsim/info_measures.hpp"
#include "qdsim/states.hpp"

namespace qdsim {

// Control qubit S copied into N target qubits, one c-not per step.
struct CnotChainModel {
  Complex a{1.0 / 1.4142135623730951, 0.0};
  Complex b{1.0 / 1.4142135623730951, 0.0};
  int n_env = 1;
};

// State after the first k gates: a|0>|0...0> + b|1>|1..1 0..0> with k copies.
// Layout is qubits (S, E_1, ..., E_N).
PureState run_cnot_chain(const CnotChainModel& model, int gates_applied,
                         std::int64_t cap = kDefaultDimensionCap);

// same state in two-branch form (spins beyond k hold identical conditionals)
BranchState cnot_chain_branch_state(const CnotChainModel& model, int gates_applied);

// sigma(mu) = cos(mu) sigma_z + sin(mu) sigma_x
Matrix sigma_mu(double mu);

// eigenbasis of sigma(mu) on `subsystem`; column 0 is the +1 eigenvector
MeasurementBasis sigma_mu_observable(double mu, int subsystem = 0);

}  // namespace qdsim
