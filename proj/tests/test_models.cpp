#include "doctest.h"

#include <cmath>

#include "qdsim/darwinism.hpp"
#include "qdsim/models.hpp"
#include "qdsim/qstate_ops.hpp"

using namespace qdsim;

namespace {

constexpr double kPi = 3.14159265358979323846;

// gate-by-gate oracle: apply k c-nots through the generic unitary machinery
PureState chain_by_gates(const CnotChainModel& model, int k) {
  SubsystemLayout layout = SubsystemLayout::qubits(model.n_env + 1);
  Vector v = Vector::Zero(layout.total_dimension());
  v(0) = model.a;
  v(layout.strides()[0]) = model.b;
  PureState psi(v, layout);
  Matrix cnot(4, 4);
  cnot.setZero();
  cnot(0, 0) = cnot(1, 1) = cnot(3, 2) = cnot(2, 3) = 1.0;
  for (int g = 1; g <= k; ++g) psi = apply_local_unitary(psi, cnot, {0, g});
  return psi;
}

}  // namespace

TEST_CASE("cnot chain state matches the gate-applied oracle") {
  CnotChainModel model;
  model.a = Complex(0.6, 0.2);
  model.b = std::sqrt(1.0 - std::norm(model.a));
  model.n_env = 5;
  for (int k = 0; k <= 5; ++k) {
    auto direct = run_cnot_chain(model, k);
    auto gated = chain_by_gates(model, k);
    CHECK(fidelity(direct, gated) > 1.0 - 1e-12);
  }
}

TEST_CASE("cnot chain agrees with its branch form") {
  CnotChainModel model;
  model.n_env = 6;
  for (int k : {0, 2, 6}) {
    auto dense = run_cnot_chain(model, k);
    auto branch = cnot_chain_branch_state(model, k);
    CHECK(fidelity(dense, branch.to_dense()) > 1.0 - 1e-12);
  }
}

TEST_CASE("no gates, no information") {
  CnotChainModel model;
  model.n_env = 4;
  auto psi = run_cnot_chain(model, 0);
  DensePureStateSource source(psi, 0);
  for (int j = 0; j < 4; ++j)
    CHECK(source.mutual_information({j}, EntropyUnit::Bits) ==
          doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("each imprinted qubit carries one full bit for a = b") {
  CnotChainModel model;
  model.n_env = 6;
  auto psi = run_cnot_chain(model, 6);
  DensePureStateSource source(psi, 0);
  for (int j = 0; j < 6; ++j)
    CHECK(source.mutual_information({j}, EntropyUnit::Bits) ==
          doctest::Approx(1.0).epsilon(1e-9));

  // the whole environment holds twice the classical level
  CHECK(source.mutual_information({0, 1, 2, 3, 4, 5}, EntropyUnit::Bits) ==
        doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("the very first c-not fully decoheres the pointer basis") {
  CnotChainModel model;
  model.a = Complex(0.48, 0.36);
  model.b = std::sqrt(1.0 - std::norm(model.a));
  model.n_env = 4;
  for (int k = 1; k <= 4; ++k) {
    auto rho_s = reduced_density(run_cnot_chain(model, k), {0});
    CHECK(std::abs(rho_s.matrix()(0, 1)) < 1e-12);
    CHECK(rho_s.matrix()(0, 0).real() == doctest::Approx(std::norm(model.a)).epsilon(1e-12));
  }
}

TEST_CASE("fragments short of the full environment satisfy I = H(F) and carry no discord") {
  CnotChainModel model;
  model.n_env = 5;
  auto psi = run_cnot_chain(model, 5);
  DensePureStateSource source(psi, 0);

  for (const FragmentSpec& frag : std::vector<FragmentSpec>{{0}, {1, 3}, {0, 2, 4}, {0, 1, 2, 3}}) {
    std::vector<int> keep{0};
    for (int e : frag) keep.push_back(e + 1);
    auto rho_sf = reduced_density(psi, keep);

    const double i_sf = source.mutual_information(frag, EntropyUnit::Bits);
    std::vector<int> f_only;
    for (int e : frag) f_only.push_back(e + 1);
    const double h_f =
        von_neumann_entropy(reduced_density(psi, f_only), EntropyUnit::Bits);
    CHECK(i_sf == doctest::Approx(h_f).epsilon(1e-9));

    // observable MI in the pointer bases matches the quantum value
    auto rho_small = reduced_density(psi, {0, static_cast<int>(frag[0]) + 1});
    MeasurementBasis zs(Matrix::Identity(2, 2), 0);
    MeasurementBasis ze(Matrix::Identity(2, 2), 1);
    const double shannon = observable_mutual_information(rho_small, zs, ze, EntropyUnit::Bits);
    const double quantum = mutual_information(rho_small, {0}, EntropyUnit::Bits);
    CHECK(shannon == doctest::Approx(quantum).epsilon(1e-9));

    // minimum discord vanishes while part of the environment stays outside
    auto min_d = min_discord(rho_small, 1, EntropyUnit::Bits);
    CHECK(min_d.discord < 1e-6);

    // also over the pointer side of the full joint state of S and F
    auto min_s = min_discord(rho_sf, 0, EntropyUnit::Bits);
    CHECK(min_s.discord < 1e-6);
  }
}

TEST_CASE("sigma(mu) observables") {
  Matrix sz = sigma_mu(0.0);
  CHECK(sz(0, 0).real() == doctest::Approx(1.0));
  CHECK(sz(1, 1).real() == doctest::Approx(-1.0));

  auto basis0 = sigma_mu_observable(0.0);
  CHECK(std::abs(basis0.vectors()(0, 0) - Complex(1.0)) < 1e-12);

  auto basis_x = sigma_mu_observable(kPi / 2.0);
  CHECK(basis_x.vectors()(0, 0).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(basis_x.vectors()(1, 0).real() == doctest::Approx(1.0 / std::sqrt(2.0)));

  // eigen-check at mu = pi/4: sigma(mu) v = +/- v
  const double mu = kPi / 4.0;
  Matrix s = sigma_mu(mu);
  auto basis = sigma_mu_observable(mu);
  Vector plus = basis.vectors().col(0), minus = basis.vectors().col(1);
  CHECK(((s * plus) - plus).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(((s * minus) + minus).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("chain rejects out-of-range gate counts") {
  CnotChainModel model;
  model.n_env = 3;
  CHECK_THROWS(run_cnot_chain(model, 4));
  CHECK_THROWS(run_cnot_chain(model, -1));
}
