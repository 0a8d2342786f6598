#include "qdsim/info_measures.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "qdsim/qstate_ops.hpp"

namespace qdsim {

namespace {

constexpr double kEigenvalueFloor = 1e-12;  // eigenvalues below this contribute zero
constexpr double kPsdNoise = 1e-10;         // clip window for PSD roundoff

// marginal over `keep`, tolerating keep == all
Matrix marginal(const DensityMatrix& rho, const std::vector<int>& keep) {
  if (static_cast<int>(keep.size()) == rho.layout().subsystem_count()) return rho.matrix();
  return partial_trace(rho, keep).matrix();
}

double entropy_of_matrix(const Matrix& m, EntropyUnit unit) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  std::vector<double> p(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return shannon_entropy(p, unit);
}

// <A_k| rho |A_k> on the measured subsystem: an operator on the remaining
// subsystems, unnormalized
Matrix partial_inner(const DensityMatrix& rho, const MeasurementBasis& basis, int outcome) {
  const auto& layout = rho.layout();
  const int s = basis.subsystem();
  const auto strides = layout.strides();
  const std::int64_t ss = strides[static_cast<std::size_t>(s)];
  const int ds = layout.dim(s);

  const auto rest = complement_of({s}, layout.subsystem_count());
  std::int64_t dr = 1;
  for (int k : rest) dr *= layout.dim(k);

  std::vector<std::int64_t> r_offset(static_cast<std::size_t>(dr));
  for (std::int64_t v = 0; v < dr; ++v) {
    std::int64_t rem = v, off = 0;
    for (int p = static_cast<int>(rest.size()) - 1; p >= 0; --p) {
      const int sub = rest[static_cast<std::size_t>(p)];
      const int d = layout.dim(sub);
      off += (rem % d) * strides[static_cast<std::size_t>(sub)];
      rem /= d;
    }
    r_offset[static_cast<std::size_t>(v)] = off;
  }

  const Vector a = basis.vectors().col(outcome);
  Matrix out = Matrix::Zero(dr, dr);
  for (std::int64_t i = 0; i < dr; ++i)
    for (std::int64_t j = 0; j < dr; ++j) {
      Complex acc = 0.0;
      for (int x = 0; x < ds; ++x)
        for (int y = 0; y < ds; ++y)
          acc += std::conj(a(x)) * a(y) *
                 rho.matrix()(r_offset[static_cast<std::size_t>(i)] + x * ss,
                              r_offset[static_cast<std::size_t>(j)] + y * ss);
      out(i, j) = acc;
    }
  return out;
}

}  // namespace

double shannon_entropy(const std::vector<double>& p, EntropyUnit unit) {
  double h = 0.0;
  for (double v : p) {
    if (v < -kPsdNoise)
      throw std::invalid_argument("shannon_entropy: negative probability " + std::to_string(v));
    if (v < kEigenvalueFloor) continue;
    h -= v * std::log(v);
  }
  return h / log_base(unit);
}

MeasurementBasis::MeasurementBasis(Matrix vectors, int subsystem)
    : vectors_(std::move(vectors)), subsystem_(subsystem) {
  if (vectors_.rows() != vectors_.cols())
    throw std::invalid_argument("MeasurementBasis: incomplete basis (need dim x dim vectors)");
  const auto d = vectors_.rows();
  if ((vectors_.adjoint() * vectors_ - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > kAlgebraTol)
    throw std::invalid_argument("MeasurementBasis: vectors not orthonormal/complete");
}

double von_neumann_entropy(const DensityMatrix& rho, EntropyUnit unit) {
  return entropy_of_matrix(rho.matrix(), unit);
}

std::vector<double> measurement_probabilities(const DensityMatrix& rho,
                                              const MeasurementBasis& basis) {
  Matrix rho_s = marginal(rho, {basis.subsystem()});
  std::vector<double> p;
  p.reserve(static_cast<std::size_t>(basis.outcome_count()));
  for (int k = 0; k < basis.outcome_count(); ++k) {
    const Vector v = basis.vectors().col(k);
    p.push_back(std::max(0.0, (v.adjoint() * rho_s * v)(0, 0).real()));
  }
  return p;
}

double shannon_entropy_of_measurement(const DensityMatrix& rho,
                                      const MeasurementBasis& basis, EntropyUnit unit) {
  return shannon_entropy(measurement_probabilities(rho, basis), unit);
}

double mutual_information(const DensityMatrix& rho, const std::vector<int>& cut,
                          EntropyUnit unit) {
  const auto rest = complement_of([&] {
    auto c = cut;
    std::sort(c.begin(), c.end());
    return c;
  }(), rho.layout().subsystem_count());
  if (cut.empty() || rest.empty())
    throw std::invalid_argument("mutual_information: cut must be a proper bipartition");
  const double hl = entropy_of_matrix(marginal(rho, cut), unit);
  const double hr = entropy_of_matrix(marginal(rho, rest), unit);
  const double hj = von_neumann_entropy(rho, unit);
  return hl + hr - hj;
}

double conditional_entropy_given_measurement(const DensityMatrix& rho,
                                             const MeasurementBasis& basis,
                                             EntropyUnit unit) {
  double h = 0.0;
  for (int k = 0; k < basis.outcome_count(); ++k) {
    Matrix cond = partial_inner(rho, basis, k);
    const double pk = cond.trace().real();
    if (pk < kEigenvalueFloor) continue;
    h += pk * entropy_of_matrix(Matrix((cond / pk + (cond / pk).adjoint()) / 2.0), unit);
  }
  return h;
}

double observable_mutual_information(const DensityMatrix& rho, const MeasurementBasis& basis_s,
                                     const MeasurementBasis& basis_a, EntropyUnit unit) {
  if (basis_s.subsystem() == basis_a.subsystem())
    throw std::invalid_argument("observable_mutual_information: bases must act on distinct subsystems");
  const int ns = basis_s.outcome_count();
  const int na = basis_a.outcome_count();

  // index of basis_a's subsystem after removing basis_s's
  const int a_idx = basis_a.subsystem() - (basis_a.subsystem() > basis_s.subsystem() ? 1 : 0);
  std::vector<int> rest_dims;
  for (int k = 0; k < rho.layout().subsystem_count(); ++k)
    if (k != basis_s.subsystem()) rest_dims.push_back(rho.layout().dim(k));
  const MeasurementBasis ba(basis_a.vectors(), a_idx);

  std::vector<double> joint(static_cast<std::size_t>(ns * na), 0.0);
  for (int j = 0; j < ns; ++j) {
    Matrix after_s = partial_inner(rho, basis_s, j);
    const double tr = after_s.trace().real();
    if (tr < kEigenvalueFloor) continue;
    DensityMatrix cond(Matrix((after_s / tr + (after_s / tr).adjoint()) / 2.0),
                       SubsystemLayout(rest_dims));
    const auto pa_given_j = measurement_probabilities(cond, ba);
    for (int k = 0; k < na; ++k)
      joint[static_cast<std::size_t>(j * na + k)] = tr * pa_given_j[static_cast<std::size_t>(k)];
  }

  std::vector<double> ps(static_cast<std::size_t>(ns), 0.0), pa(static_cast<std::size_t>(na), 0.0);
  for (int j = 0; j < ns; ++j)
    for (int k = 0; k < na; ++k) {
      ps[static_cast<std::size_t>(j)] += joint[static_cast<std::size_t>(j * na + k)];
      pa[static_cast<std::size_t>(k)] += joint[static_cast<std::size_t>(j * na + k)];
    }
  return shannon_entropy(ps, unit) + shannon_entropy(pa, unit) - shannon_entropy(joint, unit);
}

double measured_mutual_information(const DensityMatrix& rho, const MeasurementBasis& basis,
                                   EntropyUnit unit) {
  const auto rest = complement_of({basis.subsystem()}, rho.layout().subsystem_count());
  const double h_rest = entropy_of_matrix(marginal(rho, rest), unit);
  return h_rest - conditional_entropy_given_measurement(rho, basis, unit);
}

double quantum_discord(const DensityMatrix& rho, const MeasurementBasis& basis,
                       EntropyUnit unit) {
  return mutual_information(rho, {basis.subsystem()}, unit) -
         measured_mutual_information(rho, basis, unit);
}

namespace {

MeasurementBasis bloch_basis(double theta, double phi, int subsystem) {
  Matrix v(2, 2);
  const Complex eip(std::cos(phi), std::sin(phi));
  v(0, 0) = std::cos(theta / 2);
  v(1, 0) = eip * std::sin(theta / 2);
  v(0, 1) = -std::conj(eip) * std::sin(theta / 2);
  v(1, 1) = std::cos(theta / 2);
  return MeasurementBasis(std::move(v), subsystem);
}

}  // namespace

DiscordMinimum min_discord(const DensityMatrix& rho, int side, EntropyUnit unit) {
  if (rho.layout().dim(side) > 2)
    throw std::invalid_argument(
        "min_discord: unsupported configuration, measured side must have dim <= 2");

  constexpr double kPi = 3.14159265358979323846;
  const int n_theta = 64, n_phi = 128;

  double best = std::numeric_limits<double>::infinity();
  double best_theta = 0.0, best_phi = 0.0;
  auto consider = [&](double theta, double phi) {
    const double d = quantum_discord(rho, bloch_basis(theta, phi, side), unit);
    if (d < best - 1e-15) {  // strict improvement only: first hit wins ties
      best = d;
      best_theta = theta;
      best_phi = phi;
    }
  };

  for (int i = 0; i < n_theta; ++i)
    for (int j = 0; j < n_phi; ++j)
      consider(kPi * i / (n_theta - 1), 2 * kPi * j / n_phi);

  // 3 rounds of 4x shrink around the best point
  double span_theta = kPi / (n_theta - 1), span_phi = 2 * kPi / n_phi;
  for (int round = 0; round < 3; ++round) {
    const double ct = best_theta, cp = best_phi;
    const int n_local = 9;
    for (int i = 0; i < n_local; ++i)
      for (int j = 0; j < n_local; ++j) {
        const double theta =
            std::clamp(ct + span_theta * (2.0 * i / (n_local - 1) - 1.0), 0.0, kPi);
        const double phi = cp + span_phi * (2.0 * j / (n_local - 1) - 1.0);
        consider(theta, phi);
      }
    span_theta /= 4.0;
    span_phi /= 4.0;
  }

  return DiscordMinimum{best, bloch_basis(best_theta, best_phi, side)};
}

MeasurementBasis eigenbasis_of(const Matrix& observable, int subsystem) {
  if ((observable - observable.adjoint()).cwiseAbs().maxCoeff() > kAlgebraTol)
    throw std::invalid_argument("eigenbasis_of: observable must be Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(observable);
  return MeasurementBasis(es.eigenvectors(), subsystem);
}

}  // namespace qdsim
