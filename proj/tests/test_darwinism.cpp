#include "doctest.h"

#include <cmath>

#include "qdsim/darwinism.hpp"
#include "qdsim/models.hpp"
#include "qdsim/qstate_ops.hpp"
#include "qdsim/rng.hpp"

using namespace qdsim;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  return out;
}

}  // namespace

TEST_CASE("dense source cross-validates against the density-matrix route") {
  auto psi = haar_random_state(SubsystemLayout::qubits(5), 444);
  DensePureStateSource source(psi, 0);
  for (const FragmentSpec& frag : std::vector<FragmentSpec>{{0}, {1, 2}, {0, 3}, {1, 2, 3}}) {
    std::vector<int> keep{0};
    for (int e : frag) keep.push_back(e + 1);
    auto rho = reduced_density(psi, keep);
    const double direct = mutual_information(rho, {0}, EntropyUnit::Bits);
    CHECK(source.mutual_information(frag, EntropyUnit::Bits) ==
          doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("pip: exhaustive at small N, sampled above the limit, deterministic per seed") {
  auto psi = haar_random_state(SubsystemLayout::qubits(9), 7);
  DensePureStateSource source(psi, 0);
  auto curve = partial_information_plot(source, {0.0, 0.25, 0.5, 1.0}, 16, 123,
                                        EntropyUnit::Bits);
  for (const auto& pt : curve.points) CHECK(pt.exhaustive);  // C(8, m) <= 70

  auto psi2 = haar_random_state(SubsystemLayout::qubits(15), 8);
  DensePureStateSource source2(psi2, 0);
  auto c1 = partial_information_plot(source2, {0.5}, 12, 5, EntropyUnit::Bits);
  auto c2 = partial_information_plot(source2, {0.5}, 12, 5, EntropyUnit::Bits);
  CHECK_FALSE(c1.points[0].exhaustive);
  CHECK(c1.points[0].n_samples == 12);
  CHECK(c1.points[0].mean_info == c2.points[0].mean_info);  // bit-identical
  auto c3 = partial_information_plot(source2, {0.5}, 12, 6, EntropyUnit::Bits);
  CHECK(c1.points[0].mean_info != c3.points[0].mean_info);
}

TEST_CASE("pip on random states: flat and low below half, antisymmetric") {
  // 12-qubit environment, exhaustive enumeration is off, sampling on
  auto psi = haar_random_state(SubsystemLayout::qubits(13), 99);
  DensePureStateSource source(psi, 0);
  auto curve = partial_information_plot(source, {0.0, 0.125, 0.25}, 48, 11, EntropyUnit::Bits);
  for (const auto& pt : curve.points) CHECK(pt.mean_info < 0.1);
}

TEST_CASE("pip antisymmetry is exact under exhaustive enumeration at N = 8") {
  auto psi = haar_random_state(SubsystemLayout::qubits(9), 31);
  DensePureStateSource source(psi, 0);
  const double h_s = source.system_entropy(EntropyUnit::Bits);
  auto curve = partial_information_plot(source, grid(0.0, 1.0, 9), 1, 0, EntropyUnit::Bits);
  REQUIRE(curve.points.size() == 9);
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& lo = curve.points[i];
    const auto& hi = curve.points[curve.points.size() - 1 - i];
    REQUIRE(lo.exhaustive);
    CHECK(lo.mean_info + hi.mean_info == doctest::Approx(2.0 * h_s).epsilon(1e-9));
  }
  // monotone nondecreasing in f
  for (std::size_t i = 1; i < curve.points.size(); ++i)
    CHECK(curve.points[i].mean_info >= curve.points[i - 1].mean_info - 1e-9);
}

TEST_CASE("pip of the cnot chain: plateau at one bit, jump to two at f = 1") {
  CnotChainModel model;
  model.n_env = 8;
  DensePureStateSource source(run_cnot_chain(model, 8), 0);
  auto curve =
      partial_information_plot(source, grid(0.0, 1.0, 9), 1, 0, EntropyUnit::Bits);
  CHECK(curve.system_entropy == doctest::Approx(1.0).epsilon(1e-10));
  for (const auto& pt : curve.points) {
    if (pt.f == 0.0) CHECK(pt.mean_info == doctest::Approx(0.0).epsilon(1e-9));
    else if (pt.f == 1.0) CHECK(pt.mean_info == doctest::Approx(2.0).epsilon(1e-9));
    else CHECK(pt.mean_info == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("redundancy from the chain pip is exactly N") {
  CnotChainModel model;
  model.n_env = 16;
  BranchStateSource source(cnot_chain_branch_state(model, 16));
  std::vector<double> fractions;
  for (int m = 0; m <= 16; ++m) fractions.push_back(m / 16.0);
  auto curve = partial_information_plot(source, fractions, 8, 3, EntropyUnit::Bits);
  auto r = redundancy_from_pip(curve, 0.01);
  CHECK(r.f_delta == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
  CHECK(r.r_delta == doctest::Approx(16.0).epsilon(1e-9));
}

TEST_CASE("redundancy crossing on a random state sits at half the environment") {
  auto psi = haar_random_state(SubsystemLayout::qubits(11), 17);
  DensePureStateSource source(psi, 0);
  auto curve = partial_information_plot(source, grid(0.0, 1.0, 11), 1, 0, EntropyUnit::Bits);
  auto r = redundancy_from_pip(curve, 0.1);
  // no plateau: nothing short of half the environment reaches the target
  CHECK(r.f_delta == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.r_delta == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("redundancy errors when the crossing is not bracketed") {
  CnotChainModel model;
  model.n_env = 16;
  BranchStateSource source(cnot_chain_branch_state(model, 16));
  // sampled fractions all round to empty fragments, so the target is never met
  auto curve = partial_information_plot(source, {0.0, 0.01, 0.02}, 4, 9, EntropyUnit::Bits);
  CHECK_THROWS_AS(redundancy_from_pip(curve, 0.1), std::out_of_range);
}

TEST_CASE("redundancy of the pointer observable with perfect records is N") {
  // g = pi/4, t = 1: every conditional overlap cos(2 g t) = 0
  CentralSpinModel model;
  model.couplings.assign(50, kPi / 4.0);
  model.a = model.b = 1.0 / std::sqrt(2.0);
  auto st = central_spin_state_at(model, 1.0);
  auto r = redundancy_of_observable(st, 0.0, 0.1, 5);
  CHECK(r.redundancy == 50);
  for (int s : r.fragment_sizes) CHECK(s == 1);
}

TEST_CASE("complementary observable is recorded at most once") {
  auto model = CentralSpinModel::random_couplings(50, 21, 1.0 / std::sqrt(2.0),
                                                  1.0 / std::sqrt(2.0));
  const double t = 1.0 / model.average_action(1.0);  // <g t> = 1
  auto st = central_spin_state_at(model, t);
  auto r = redundancy_of_observable(st, kPi / 2.0, 0.1, 5);
  CHECK(r.redundancy <= 1);

  auto r0 = redundancy_of_observable(st, 0.0, 0.1, 5);
  CHECK(r0.redundancy > 5);
}

TEST_CASE("no evolution, no records") {
  auto model = CentralSpinModel::random_couplings(20, 2, 1.0 / std::sqrt(2.0),
                                                  1.0 / std::sqrt(2.0));
  auto st = central_spin_state_at(model, 0.0);
  auto r = redundancy_of_observable(st, 0.0, 0.1, 1);
  CHECK(r.redundancy == 0);
}

TEST_CASE("observable fragment information matches the dense joint distribution") {
  // oracle: build the dense state, measure sigma(mu) on S and the Helstrom
  // basis on the fragment through the generic observable MI machinery
  const int n = 6;
  auto model = CentralSpinModel::random_couplings(n, 77, 0.6, 0.8);
  auto st = central_spin_state_at(model, 1.3);
  auto dense = st.to_dense();

  for (double mu : {0.0, 0.4, kPi / 2}) {
    for (const FragmentSpec& frag : std::vector<FragmentSpec>{{2}, {0, 4}}) {
      const double fast = observable_fragment_information(st, mu, frag, EntropyUnit::Bits);

      // dense route: joint rho over (S, fragment spins)
      std::vector<int> keep{0};
      for (int e : frag) keep.push_back(e + 1);
      auto rho = reduced_density(dense, keep);

      // Helstrom basis on the fragment from the branch product vectors
      Vector f0 = Vector::Ones(1), f1 = Vector::Ones(1);
      for (int e : frag) {
        Vector n0(2 * f0.size()), n1(2 * f1.size());
        for (Eigen::Index i = 0; i < f0.size(); ++i) {
          n0.segment(2 * i, 2) = f0(i) * st.conditional(e, 0);
          n1.segment(2 * i, 2) = f1(i) * st.conditional(e, 1);
        }
        f0.swap(n0);
        f1.swap(n1);
      }
      Matrix w = std::norm(st.a()) * (f0 * f0.adjoint()) -
                 std::norm(st.b()) * (f1 * f1.adjoint());
      Eigen::SelfAdjointEigenSolver<Matrix> es(w);
      // two eigenvectors with the largest-magnitude eigenvalues span {f0, f1}
      Matrix basis(w.rows(), w.cols());
      std::vector<std::pair<double, Eigen::Index>> mag;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        mag.push_back({-std::abs(es.eigenvalues()(i)), i});
      std::sort(mag.begin(), mag.end());
      for (std::size_t i = 0; i < mag.size(); ++i) basis.col(static_cast<Eigen::Index>(i)) =
          es.eigenvectors().col(mag[i].second);

      MeasurementBasis bs(sigma_mu_observable(mu).vectors(), 0);
      MeasurementBasis bf(basis, 1);
      // rho is (S, frag...) with fragment flattened into one subsystem
      std::vector<int> dims{2, static_cast<int>(f0.size())};
      DensityMatrix flat(rho.matrix(), SubsystemLayout(dims));
      const double slow = observable_mutual_information(flat, bs, bf, EntropyUnit::Bits);
      CHECK(fast == doctest::Approx(slow).epsilon(1e-8));
    }
  }
}

TEST_CASE("decohered by fragment: branch form") {
  auto model = CentralSpinModel::random_couplings(8, 5, Complex(0.6, 0.1),
                                                  std::sqrt(1.0 - 0.37));
  auto st = central_spin_state_at(model, 1.1);

  // empty fragment leaves S pure
  auto pure = decohered_by_fragment(st, {});
  CHECK((pure.matrix() * pure.matrix()).trace().real() == doctest::Approx(1.0).epsilon(1e-10));

  // perfect records einselect the pointer basis
  CentralSpinModel perfect;
  perfect.couplings.assign(4, kPi / 4.0);
  perfect.a = perfect.b = 1.0 / std::sqrt(2.0);
  auto stp = central_spin_state_at(perfect, 1.0);
  auto einselected = decohered_by_fragment(stp, {0, 1, 2, 3});
  CHECK(std::abs(einselected.matrix()(0, 1)) < 1e-12);
}

TEST_CASE("H(F) = H(S decohered by F) for pure branch states") {
  const int n = 8;
  auto model = CentralSpinModel::random_couplings(n, 15, 0.6, 0.8);
  auto st = central_spin_state_at(model, 1.7);
  auto dense = st.to_dense();
  Rng rng(4);
  for (int trial = 0; trial < 12; ++trial) {
    auto frag = rng.subset(n, 1 + static_cast<int>(rng.below(n)));

    const double h_sdf_branch =
        von_neumann_entropy(decohered_by_fragment(st, frag), EntropyUnit::Bits);
    const double h_f = branch_entropy_fragment(st, frag, EntropyUnit::Bits);
    CHECK(h_f == doctest::Approx(h_sdf_branch).epsilon(1e-9));

    // dense route agrees
    auto rho_dense = decohered_by_fragment(dense, 0, Matrix::Identity(2, 2), frag);
    CHECK(von_neumann_entropy(rho_dense, EntropyUnit::Bits) ==
          doctest::Approx(h_sdf_branch).epsilon(1e-9));
    CHECK((rho_dense.matrix().cwiseAbs() - decohered_by_fragment(st, frag).matrix().cwiseAbs())
              .cwiseAbs()
              .maxCoeff() < 1e-9);
  }
}

TEST_CASE("dense decohered_by_fragment rejects non-product conditionals") {
  // a Haar state generically entangles the fragment with the rest
  auto psi = haar_random_state(SubsystemLayout::qubits(4), 3);
  CHECK_THROWS_AS(decohered_by_fragment(psi, 0, Matrix::Identity(2, 2), {0}),
                  std::invalid_argument);
}

TEST_CASE("effective decoherence: I(S:F) = H(F) once the complement keeps S decohered") {
  auto model = CentralSpinModel::random_couplings(40, 10, 1.0 / std::sqrt(2.0),
                                                  1.0 / std::sqrt(2.0));
  const double t = 3.0;
  auto st = central_spin_state_at(model, t);
  Rng rng(77);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    auto frag = rng.subset(40, 1 + static_cast<int>(rng.below(6)));
    const double gamma = std::abs(decoherence_factor(st, complement_of(frag, 40)));
    if (gamma >= 1e-6) continue;
    ++checked;
    const double i_sf = branch_mutual_information(st, frag, EntropyUnit::Bits);
    const double h_f = branch_entropy_fragment(st, frag, EntropyUnit::Bits);
    CHECK(std::abs(i_sf - h_f) < 1e-6);
  }
  CHECK(checked > 10);
}
