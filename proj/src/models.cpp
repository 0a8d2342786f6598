#include "qdsim/models.hpp"

#include <cmath>

namespace qdsim {

PureState run_cnot_chain(const CnotChainModel& model, int gates_applied, std::int64_t cap) {
  if (gates_applied < 0 || gates_applied > model.n_env)
    throw std::invalid_argument("run_cnot_chain: gates_applied must be in [0, n_env]");
  if (std::abs(std::norm(model.a) + std::norm(model.b) - 1.0) > kStateTol)
    throw std::invalid_argument("run_cnot_chain: |a|^2 + |b|^2 != 1");

  SubsystemLayout layout(std::vector<int>(static_cast<std::size_t>(model.n_env) + 1, 2), {}, cap);
  Vector v = Vector::Zero(layout.total_dimension());
  // branch 0: |0, 0...0>; branch 1: |1, 1..1 0..0> with gates_applied ones
  const auto strides = layout.strides();
  std::int64_t idx1 = strides[0];  // S = 1
  for (int k = 1; k <= gates_applied; ++k) idx1 += strides[static_cast<std::size_t>(k)];
  v(0) = model.a;
  v(idx1) = model.b;
  return PureState(std::move(v), std::move(layout));
}

BranchState cnot_chain_branch_state(const CnotChainModel& model, int gates_applied) {
  if (gates_applied < 0 || gates_applied > model.n_env)
    throw std::invalid_argument("cnot_chain_branch_state: gates_applied must be in [0, n_env]");
  std::vector<std::array<Qubit, 2>> cond(static_cast<std::size_t>(model.n_env));
  for (int k = 0; k < model.n_env; ++k) {
    cond[static_cast<std::size_t>(k)][0] = Qubit(1.0, 0.0);
    cond[static_cast<std::size_t>(k)][1] =
        k < gates_applied ? Qubit(0.0, 1.0) : Qubit(1.0, 0.0);
  }
  return BranchState(model.a, model.b, std::move(cond));
}

Matrix sigma_mu(double mu) {
  Matrix s(2, 2);
  s << std::cos(mu), std::sin(mu), std::sin(mu), -std::cos(mu);
  return s;
}

MeasurementBasis sigma_mu_observable(double mu, int subsystem) {
  // closed-form eigenbasis; eigenvalue +1 first
  Matrix v(2, 2);
  v(0, 0) = std::cos(mu / 2);
  v(1, 0) = std::sin(mu / 2);
  v(0, 1) = -std::sin(mu / 2);
  v(1, 1) = std::cos(mu / 2);
  return MeasurementBasis(std::move(v), subsystem);
}

}  // namespace qdsim
