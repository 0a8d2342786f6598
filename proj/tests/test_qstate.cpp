#include "doctest.h"

#include <cmath>

#include "qdsim/qstate_ops.hpp"
#include "qdsim/rng.hpp"
#include "qdsim/schmidt.hpp"

using namespace qdsim;

namespace {

PureState bell_state() {
  Vector v(4);
  v << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
  return PureState(v, SubsystemLayout::qubits(2));
}

PureState ket(const SubsystemLayout& layout, std::int64_t idx) {
  return PureState::basis(layout, idx);
}

}  // namespace

TEST_CASE("layout validates dims and cap") {
  CHECK_THROWS(SubsystemLayout({1, 2}));
  CHECK_THROWS(SubsystemLayout({2, 2, 2}, {}, 4));  // 8 amplitudes > cap 4
  SubsystemLayout l({2, 3, 2});
  CHECK(l.total_dimension() == 12);
  CHECK(l.strides() == std::vector<std::int64_t>{6, 2, 1});
}

TEST_CASE("tensor product basics") {
  SubsystemLayout q1 = SubsystemLayout::qubits(1);
  auto zero = ket(q1, 0);

  auto joint = tensor_product(zero, zero);
  CHECK(joint.layout().total_dimension() == 4);
  CHECK(joint.amplitudes()(0) == Complex(1.0));

  // dim-2 (x) dim-3 bookkeeping
  SubsystemLayout d3({3});
  auto mixed_dims = tensor_product(zero, ket(d3, 2));
  CHECK(mixed_dims.layout().dims() == std::vector<int>{2, 3});
  CHECK(mixed_dims.amplitudes()(2) == Complex(1.0));

  // ((|0> + |1>)/sqrt2) (x) |0>
  Vector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  auto prod = tensor_product(PureState(plus, q1), zero);
  CHECK(prod.amplitudes()(0).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(prod.amplitudes()(2).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(prod.amplitudes()(1)) == 0.0);

  CHECK_THROWS_AS(tensor_product(haar_random_state(SubsystemLayout::qubits(12), 1),
                                 haar_random_state(SubsystemLayout::qubits(12), 2)),
                  std::invalid_argument);  // 2^24 over the default cap
}

TEST_CASE("partial trace of Bell state is maximally mixed") {
  auto rho = reduced_density(bell_state(), {0});
  CHECK(std::abs(rho.matrix()(0, 0) - 0.5) < 1e-12);
  CHECK(std::abs(rho.matrix()(1, 1) - 0.5) < 1e-12);
  CHECK(std::abs(rho.matrix()(0, 1)) < 1e-12);
}

TEST_CASE("partial trace factorizes product states") {
  Rng rng(7);
  auto a = haar_random_state(SubsystemLayout::qubits(2), 11);
  auto b = haar_random_state(SubsystemLayout({3}), 12);
  auto joint = tensor_product(a, b);
  auto rho_a = reduced_density(joint, {0, 1});
  Matrix expect = a.amplitudes() * a.amplitudes().adjoint();
  CHECK((rho_a.matrix() - expect).cwiseAbs().maxCoeff() < 1e-12);

  // density-matrix route agrees
  auto rho_full = DensityMatrix::from_pure(joint);
  auto rho_a2 = partial_trace(rho_full, {0, 1});
  CHECK((rho_a2.matrix() - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial trace errors on empty or full keep") {
  auto rho = DensityMatrix::from_pure(bell_state());
  CHECK_THROWS(partial_trace(rho, {}));
  CHECK_THROWS(partial_trace(rho, {0, 1}));
}

TEST_CASE("nested partial trace equals direct") {
  auto psi = haar_random_state(SubsystemLayout::qubits(4), 42);
  auto rho = DensityMatrix::from_pure(psi);
  auto big = partial_trace(rho, {0, 1, 2});
  auto nested = partial_trace(big, {0, 2});
  auto direct = partial_trace(rho, {0, 2});
  CHECK((nested.matrix() - direct.matrix()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("schmidt decomposition: Bell, product, and 2/3-1/3 state") {
  auto dec = schmidt_decompose(bell_state(), {0});
  CHECK(dec.coefficients[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(dec.coefficients[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

  // sqrt(2/3) |0>|+'> + sqrt(1/3) |1>|2'> over dims (2, 3)
  Vector v(6);
  v.setZero();
  v(0) = std::sqrt(2.0 / 3.0) / std::sqrt(2.0);
  v(1) = std::sqrt(2.0 / 3.0) / std::sqrt(2.0);
  v(5) = std::sqrt(1.0 / 3.0);
  PureState psi(v, SubsystemLayout({2, 3}));
  auto dec2 = schmidt_decompose(psi, {0});
  CHECK(dec2.coefficients[0] == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
  CHECK(dec2.coefficients[1] == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-12));

  auto prod = tensor_product(ket(SubsystemLayout::qubits(1), 0),
                             haar_random_state(SubsystemLayout::qubits(2), 3));
  auto dec3 = schmidt_decompose(prod, {0});
  CHECK(dec3.coefficients[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dec3.coefficients[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("schmidt reconstruction round trip") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto psi = haar_random_state(SubsystemLayout({2, 3, 2, 2}), 100 + seed);
    for (const auto& cut : std::vector<std::vector<int>>{{0}, {1}, {0, 2}, {1, 3}, {0, 1, 2}}) {
      auto dec = schmidt_decompose(psi, cut);
      auto back = dec.reconstruct();
      CHECK(fidelity(psi, back) > 1.0 - 1e-9);
      // orthonormality of the families
      Matrix gl = dec.left_vectors.adjoint() * dec.left_vectors;
      CHECK((gl - Matrix::Identity(gl.rows(), gl.cols())).cwiseAbs().maxCoeff() < 1e-10);
      double sum = 0.0;
      for (double c : dec.coefficients) sum += c * c;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("apply_local_unitary: identity, swap gate, marginal invariance") {
  auto psi = haar_random_state(SubsystemLayout::qubits(3), 5);
  auto same = apply_local_unitary(psi, Matrix::Identity(2, 2), {1});
  CHECK(fidelity(psi, same) == doctest::Approx(1.0).epsilon(1e-12));

  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  auto flipped = apply_local_unitary(ket(SubsystemLayout::qubits(2), 0), x, {0});
  CHECK(std::abs(flipped.amplitudes()(2) - Complex(1.0)) < 1e-12);

  // phase unitary on one side of a Schmidt state: global state moves, the
  // acted-on marginal stays put
  auto ent = haar_random_state(SubsystemLayout::qubits(2), 9);
  Matrix phase = Matrix::Identity(2, 2);
  phase(1, 1) = Complex(std::cos(0.7), std::sin(0.7));
  auto rotated = apply_local_unitary(ent, phase, {0});
  CHECK(fidelity(ent, rotated) < 1.0 - 1e-6);
  auto before = reduced_density(ent, {1});
  auto after = reduced_density(rotated, {1});
  CHECK((before.matrix() - after.matrix()).cwiseAbs().maxCoeff() < 1e-10);

  CHECK_THROWS(apply_local_unitary(psi, 2.0 * Matrix::Identity(2, 2), {0}));
  CHECK_THROWS(apply_local_unitary(psi, Matrix::Identity(4, 4), {0}));
}

TEST_CASE("apply_local_unitary on non-adjacent targets matches dense kron") {
  // cnot on (0, 2) of three qubits, built two ways
  Matrix cnot(4, 4);
  cnot.setZero();
  cnot(0, 0) = cnot(1, 1) = cnot(3, 2) = cnot(2, 3) = 1.0;
  auto psi = haar_random_state(SubsystemLayout::qubits(3), 21);
  auto fast = apply_local_unitary(psi, cnot, {0, 2});

  // dense: permute (0,2,1), apply cnot (x) 1, permute back
  auto p = permute_subsystems(psi, {0, 2, 1});
  Matrix big = Matrix::Zero(8, 8);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 2; ++k) big(2 * i + k, 2 * j + k) = cnot(i, j);
  auto q = apply_local_unitary(p, big, {0, 1, 2});
  auto slow = permute_subsystems(q, {0, 2, 1});
  CHECK(fidelity(fast, slow) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("haar states: determinism, normalization, marginal purity oracle") {
  auto a = haar_random_state(SubsystemLayout::qubits(3), 77);
  auto b = haar_random_state(SubsystemLayout::qubits(3), 77);
  CHECK((a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff() == 0.0);

  for (std::uint64_t s = 0; s < 1000; ++s) {
    auto psi = haar_random_state(SubsystemLayout({2}), s);
    CHECK(std::abs(psi.amplitudes().squaredNorm() - 1.0) < 1e-10);
  }

  // known Haar average of marginal purity: (d_S + d_E) / (d_S d_E + 1)
  const int n_env_qubits = 5;
  const double d_s = 2.0, d_e = 1 << n_env_qubits;
  const double expect = (d_s + d_e) / (d_s * d_e + 1.0);
  double mean = 0.0;
  const int draws = 400;
  for (int i = 0; i < draws; ++i) {
    auto psi = haar_random_state(SubsystemLayout::qubits(1 + n_env_qubits),
                                 9000 + static_cast<std::uint64_t>(i));
    auto spec = marginal_spectrum(psi, {0});
    double purity = 0.0;
    for (double p : spec) purity += p * p;
    mean += purity / draws;
  }
  CHECK(std::abs(mean - expect) < 0.005);
}

TEST_CASE("marginal spectrum matches dense partial trace") {
  auto psi = haar_random_state(SubsystemLayout({2, 3, 2, 2}), 31);
  auto spec = marginal_spectrum(psi, {1, 3});
  auto rho = reduced_density(psi, {1, 3});
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
  // es ascending, spec descending
  const auto n = es.eigenvalues().size();
  for (Eigen::Index i = 0; i < n; ++i)
    CHECK(spec[static_cast<std::size_t>(i)] ==
          doctest::Approx(es.eigenvalues()(n - 1 - i)).epsilon(1e-10));
}

TEST_CASE("pure state entropy duality across any cut") {
  auto psi = haar_random_state(SubsystemLayout({2, 2, 3, 2}), 55);
  for (const auto& cut : std::vector<std::vector<int>>{{0}, {2}, {0, 3}, {1, 2}}) {
    auto left = marginal_spectrum(psi, cut);
    auto right = marginal_spectrum(psi, complement_of(cut, 4));
    double hl = 0.0, hr = 0.0;
    for (double p : left)
      if (p > 1e-12) hl -= p * std::log2(p);
    for (double p : right)
      if (p > 1e-12) hr -= p * std::log2(p);
    CHECK(hl == doctest::Approx(hr).epsilon(1e-9));
  }
}
