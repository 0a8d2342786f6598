#include "qdsim/branch_state.hpp"

#include <cmath>

#include "qdsim/qstate_ops.hpp"
#include "qdsim/rng.hpp"

namespace qdsim {

BranchState::BranchState(Complex a, Complex b, std::vector<std::array<Qubit, 2>> conditionals)
    : a_(a), b_(b), cond_(std::move(conditionals)) {
  if (std::abs(std::norm(a_) + std::norm(b_) - 1.0) > kStateTol)
    throw std::invalid_argument("BranchState: |a|^2 + |b|^2 != 1");
  for (const auto& pair : cond_)
    for (const auto& q : pair)
      if (std::abs(q.squaredNorm() - 1.0) > kStateTol)
        throw std::invalid_argument("BranchState: conditional state not normalized");
}

Complex BranchState::overlap(int spin) const {
  return conditional(spin, 1).dot(conditional(spin, 0));
}

PureState BranchState::to_dense(std::int64_t cap) const {
  SubsystemLayout layout(std::vector<int>(static_cast<std::size_t>(n_env() + 1), 2), {}, cap);
  const std::int64_t denv = layout.total_dimension() / 2;
  Vector v = Vector::Zero(layout.total_dimension());
  for (int branch = 0; branch < 2; ++branch) {
    Vector prod = Vector::Ones(1);
    for (int k = 0; k < n_env(); ++k) {
      Vector next(prod.size() * 2);
      const Qubit& q = conditional(k, branch);
      for (std::int64_t i = 0; i < prod.size(); ++i) {
        next(2 * i) = prod(i) * q(0);
        next(2 * i + 1) = prod(i) * q(1);
      }
      prod.swap(next);
    }
    v.segment(branch * denv, denv) = (branch == 0 ? a_ : b_) * prod;
  }
  const double n = v.norm();
  v /= n;
  return PureState(std::move(v), std::move(layout));
}

double CentralSpinModel::average_action(double t) const {
  double s = 0.0;
  for (double g : couplings) s += g;
  return couplings.empty() ? 0.0 : s * t / static_cast<double>(couplings.size());
}

CentralSpinModel CentralSpinModel::random_couplings(int n, std::uint64_t seed, Complex a,
                                                    Complex b) {
  CentralSpinModel m;
  m.a = a;
  m.b = b;
  Rng rng(mix64(seed ^ 0x9216d5d98979fb1bULL));
  m.couplings.resize(static_cast<std::size_t>(n));
  for (auto& g : m.couplings) g = rng.uniform_pos();  // uniform in (0, 1]
  return m;
}

BranchState central_spin_state_at(const CentralSpinModel& model, double t) {
  if (t < 0) throw std::invalid_argument("central_spin_state_at: t must be >= 0");
  if (!model.env_initial.empty() &&
      static_cast<int>(model.env_initial.size()) != model.n_env())
    throw std::invalid_argument("central_spin_state_at: env_initial size mismatch");

  std::vector<std::array<Qubit, 2>> cond(static_cast<std::size_t>(model.n_env()));
  for (int k = 0; k < model.n_env(); ++k) {
    const Qubit init = model.env_initial.empty() ? Qubit(1.0, 0.0)
                                                 : model.env_initial[static_cast<std::size_t>(k)];
    const double theta = model.couplings[static_cast<std::size_t>(k)] * t;
    // exp(-i theta sigma_y) = [[cos, -sin], [sin, cos]]
    Eigen::Matrix2cd rot;
    rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    cond[static_cast<std::size_t>(k)][0] = rot * init;                 // sigma_z = +1 branch
    cond[static_cast<std::size_t>(k)][1] = rot.transpose() * init;     // sigma_z = -1 branch
  }
  return BranchState(model.a, model.b, std::move(cond));
}

Complex decoherence_factor(const BranchState& state, const std::vector<int>& excluded) {
  Complex gamma = 1.0;
  for (int k : excluded) {
    if (k < 0 || k >= state.n_env())
      throw std::invalid_argument("decoherence_factor: spin index out of range");
    gamma *= state.overlap(k);
  }
  return gamma;
}

DensityMatrix reduced_joint_density(const BranchState& state, const std::vector<int>& fragment,
                                    bool include_system, std::int64_t cap) {
  std::vector<int> frag = fragment;
  std::sort(frag.begin(), frag.end());
  const auto rest = complement_of(frag, state.n_env());
  const Complex gamma_rest = decoherence_factor(state, rest);

  const int n_sub = static_cast<int>(frag.size()) + (include_system ? 1 : 0);
  if (n_sub == 0)
    throw std::invalid_argument("reduced_joint_density: nothing kept");
  SubsystemLayout layout(std::vector<int>(static_cast<std::size_t>(n_sub), 2), {}, cap);

  // branch product vectors restricted to (S?) + fragment
  Vector v0 = Vector::Ones(1), v1 = Vector::Ones(1);
  auto extend = [](Vector& v, const Qubit& q) {
    Vector next(v.size() * 2);
    for (std::int64_t i = 0; i < v.size(); ++i) {
      next(2 * i) = v(i) * q(0);
      next(2 * i + 1) = v(i) * q(1);
    }
    v.swap(next);
  };
  if (include_system) {
    extend(v0, Qubit(1.0, 0.0));
    extend(v1, Qubit(0.0, 1.0));
  }
  for (int k : frag) {
    extend(v0, state.conditional(k, 0));
    extend(v1, state.conditional(k, 1));
  }

  const Complex a = state.a(), b = state.b();
  // the system trace annihilates the cross term (orthogonal S factors)
  const Complex cross = include_system ? a * std::conj(b) * gamma_rest : Complex(0.0);
  Matrix rho = std::norm(a) * (v0 * v0.adjoint()) + std::norm(b) * (v1 * v1.adjoint()) +
               cross * (v0 * v1.adjoint()) + std::conj(cross) * (v1 * v0.adjoint());
  rho = (rho + Matrix(rho.adjoint())) / 2.0;
  return DensityMatrix(std::move(rho), std::move(layout));
}

std::array<double, 2> rank_two_spectrum(double w0, double w1, Complex cross, Complex s) {
  // 2x2 representation on the orthonormal span basis {v0, (v1 - s v0)/c}
  const double c2 = std::max(0.0, 1.0 - std::norm(s));
  const double c = std::sqrt(c2);
  const double m00 = w0 + w1 * std::norm(s) + 2.0 * (cross * std::conj(s)).real();
  const double m11 = w1 * c2;
  const Complex m01 = w1 * s * c + cross * c;
  const double tr = m00 + m11;
  const double det = m00 * m11 - std::norm(m01);
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  return {tr / 2.0 + disc, tr / 2.0 - disc};
}

double branch_entropy_system(const BranchState& state, EntropyUnit unit) {
  std::vector<int> all(static_cast<std::size_t>(state.n_env()));
  for (int k = 0; k < state.n_env(); ++k) all[static_cast<std::size_t>(k)] = k;
  const Complex gamma = decoherence_factor(state, all);
  const auto lam = rank_two_spectrum(std::norm(state.a()), std::norm(state.b()),
                                     state.a() * std::conj(state.b()) * gamma, Complex(0.0));
  return shannon_entropy({lam[0], lam[1]}, unit);
}

double branch_entropy_fragment(const BranchState& state, const std::vector<int>& fragment,
                               EntropyUnit unit) {
  // rho_F = |a|^2 |f0><f0| + |b|^2 |f1><f1|; tracing S kills the cross term
  Complex s = 1.0;  // <f0|f1>
  for (int k : fragment) s *= std::conj(state.overlap(k));
  const auto lam =
      rank_two_spectrum(std::norm(state.a()), std::norm(state.b()), Complex(0.0), s);
  return shannon_entropy({lam[0], lam[1]}, unit);
}

double branch_entropy_joint(const BranchState& state, const std::vector<int>& fragment,
                            EntropyUnit unit) {
  std::vector<int> frag = fragment;
  std::sort(frag.begin(), frag.end());
  const Complex gamma_rest = decoherence_factor(state, complement_of(frag, state.n_env()));
  // v0, v1 orthogonal (distinct S factors)
  const auto lam = rank_two_spectrum(std::norm(state.a()), std::norm(state.b()),
                                     state.a() * std::conj(state.b()) * gamma_rest, Complex(0.0));
  return shannon_entropy({lam[0], lam[1]}, unit);
}

double branch_mutual_information(const BranchState& state, const std::vector<int>& fragment,
                                 EntropyUnit unit) {
  return branch_entropy_system(state, unit) + branch_entropy_fragment(state, fragment, unit) -
         branch_entropy_joint(state, fragment, unit);
}

}  // namespace qdsim
