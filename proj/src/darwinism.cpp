#include "qdsim/darwinism.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "qdsim/qstate_ops.hpp"
#include "qdsim/rng.hpp"

namespace qdsim {

namespace {

double spectrum_entropy(const std::vector<double>& spectrum, EntropyUnit unit) {
  return shannon_entropy(spectrum, unit);
}

// C(n, k) capped so the caller can compare against a small limit
std::int64_t binomial_capped(int n, int k, std::int64_t cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;  // exact: product of i consecutive integers divides by i!
    if (r > cap) return cap + 1;
  }
  return r;
}

}  // namespace

DensePureStateSource::DensePureStateSource(PureState psi, int system_index)
    : psi_(std::move(psi)), system_(system_index) {
  if (system_ < 0 || system_ >= psi_.layout().subsystem_count())
    throw std::invalid_argument("DensePureStateSource: system index out of range");
}

int DensePureStateSource::environment_size() const {
  return psi_.layout().subsystem_count() - 1;
}

std::vector<int> DensePureStateSource::env_subsystems(const FragmentSpec& fragment) const {
  // environment indices skip over the system subsystem
  std::vector<int> out;
  out.reserve(fragment.size());
  for (int e : fragment) {
    if (e < 0 || e >= environment_size())
      throw std::invalid_argument("fragment index out of range");
    out.push_back(e < system_ ? e : e + 1);
  }
  return out;
}

double DensePureStateSource::system_entropy(EntropyUnit unit) const {
  return spectrum_entropy(marginal_spectrum(psi_, {system_}), unit);
}

double DensePureStateSource::mutual_information(const FragmentSpec& fragment,
                                                EntropyUnit unit) const {
  if (fragment.empty()) return 0.0;
  std::vector<int> frag = env_subsystems(fragment);
  std::sort(frag.begin(), frag.end());

  // purity of the global state: every entropy is a Schmidt spectrum of a cut
  const double h_s = system_entropy(unit);
  const double h_f = spectrum_entropy(marginal_spectrum(psi_, frag), unit);
  double h_sf = 0.0;
  std::vector<int> sf = frag;
  sf.push_back(system_);
  std::sort(sf.begin(), sf.end());
  if (static_cast<int>(sf.size()) == psi_.layout().subsystem_count()) {
    h_sf = 0.0;  // whole pure state
  } else {
    h_sf = spectrum_entropy(marginal_spectrum(psi_, sf), unit);
  }
  return h_s + h_f - h_sf;
}

PIPCurve partial_information_plot(const MutualInfoSource& source,
                                  const std::vector<double>& fractions, int samples_per_f,
                                  std::uint64_t seed, EntropyUnit unit,
                                  std::int64_t exhaustive_limit) {
  const int n = source.environment_size();
  if (samples_per_f < 1)
    throw std::invalid_argument("partial_information_plot: samples_per_f must be >= 1");
  PIPCurve curve;
  curve.samples_per_f = samples_per_f;
  curve.seed = seed;
  curve.unit = unit;
  curve.system_entropy = source.system_entropy(unit);

  std::vector<double> fs = fractions;
  std::sort(fs.begin(), fs.end());
  fs.erase(std::unique(fs.begin(), fs.end()), fs.end());

  for (double f : fs) {
    if (f < 0.0 || f > 1.0)
      throw std::invalid_argument("partial_information_plot: fraction outside [0, 1]");
    const int m = static_cast<int>(std::floor(f * n + 0.5));  // round half up

    PIPPoint pt;
    pt.f = f;

    double sum = 0.0, sum_sq = 0.0;
    int count = 0;
    if (binomial_capped(n, m, exhaustive_limit) <= exhaustive_limit) {
      // enumerate every m-subset
      pt.exhaustive = true;
      std::vector<int> idx(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = i;
      while (true) {
        const double v = source.mutual_information(idx, unit);
        sum += v;
        sum_sq += v * v;
        ++count;
        // next combination
        int pos = m - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - m + pos) --pos;
        if (pos < 0) break;
        ++idx[static_cast<std::size_t>(pos)];
        for (int j = pos + 1; j < m; ++j)
          idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
      }
    } else {
      const std::uint64_t f_tag = mix64(static_cast<std::uint64_t>(m) + 0x5851f42d4c957f2dULL);
      for (int i = 0; i < samples_per_f; ++i) {
        Rng rng = derived_rng(seed, f_tag, static_cast<std::uint64_t>(i));
        const double v = source.mutual_information(rng.subset(n, m), unit);
        sum += v;
        sum_sq += v * v;
        ++count;
      }
    }
    pt.n_samples = count;
    pt.mean_info = sum / count;
    if (count > 1) {
      const double var = std::max(0.0, (sum_sq - sum * sum / count) / (count - 1));
      pt.stderr_info = std::sqrt(var / count);
    }
    curve.points.push_back(pt);
  }
  return curve;
}

RedundancyResult redundancy_from_pip(const PIPCurve& curve, double delta) {
  if (delta <= 0.0 || delta >= 1.0)
    throw std::invalid_argument("redundancy_from_pip: delta must lie in (0, 1)");
  const double target = (1.0 - delta) * curve.system_entropy;

  RedundancyResult out;
  out.delta = delta;
  double lo_f = 0.0, lo_i = 0.0;
  bool have_below = false;
  for (const auto& pt : curve.points) {
    if (pt.mean_info >= target) {
      if (pt.f <= 0.0)
        throw std::out_of_range("redundancy_from_pip: crossing not bracketed from below");
      out.f_delta = pt.f;
      out.r_delta = 1.0 / pt.f;
      if (have_below && pt.mean_info > lo_i) {
        out.f_interpolated = lo_f + (target - lo_i) * (pt.f - lo_f) / (pt.mean_info - lo_i);
        out.interpolated = out.f_interpolated < pt.f - 1e-15;
      } else {
        out.f_interpolated = pt.f;
      }
      out.r_interpolated = 1.0 / out.f_interpolated;
      return out;
    }
    lo_f = pt.f;
    lo_i = pt.mean_info;
    have_below = true;
  }
  double max_i = 0.0;
  for (const auto& pt : curve.points) max_i = std::max(max_i, pt.mean_info);
  throw std::out_of_range("redundancy_from_pip: target " + std::to_string(target) +
                          " not reached; achievable I in [0, " + std::to_string(max_i) + "]");
}

namespace {

// Two-outcome fragment measurement statistics in the 2d span of the branch
// fragment states. Everything reduces to the Gram data (s = <f0|f1>, the
// decoherence factor of the complement, and the branch amplitudes).
struct FragmentGram {
  Complex s;           // <f0|f1>
  Complex gamma_rest;  // decoherence factor over spins outside the fragment
};

FragmentGram fragment_gram(const BranchState& state, const FragmentSpec& fragment) {
  std::vector<bool> in(static_cast<std::size_t>(state.n_env()), false);
  for (int k : fragment) in[static_cast<std::size_t>(k)] = true;
  FragmentGram g{Complex(1.0, 0.0), Complex(1.0, 0.0)};
  for (int k = 0; k < state.n_env(); ++k) {
    if (in[static_cast<std::size_t>(k)])
      g.s *= std::conj(state.overlap(k));  // <eps0|eps1>
    else
      g.gamma_rest *= state.overlap(k);
  }
  return g;
}

}  // namespace

double observable_fragment_information(const BranchState& state, double mu,
                                       const FragmentSpec& fragment, EntropyUnit unit) {
  const FragmentGram g = fragment_gram(state, fragment);
  const Complex a = state.a(), b = state.b();

  // sigma(mu) eigenvectors on S: m0 = (cos mu/2, sin mu/2), m1 = (-sin, cos)
  const double c = std::cos(mu / 2), s = std::sin(mu / 2);
  const Complex m[2][2] = {{Complex(c), Complex(s)}, {Complex(-s), Complex(c)}};

  // fragment states in the orthonormal span basis {e1 = f0, e2}
  const double cperp = std::sqrt(std::max(0.0, 1.0 - std::norm(g.s)));
  Eigen::Vector2cd f0(1.0, 0.0), f1(g.s, cperp);

  // measurement basis: eigenvectors of |a|^2 |f0><f0| - |b|^2 |f1><f1|
  Eigen::Matrix2cd w = std::norm(a) * (f0 * f0.adjoint()) - std::norm(b) * (f1 * f1.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(w);
  const Eigen::Matrix2cd pbasis = es.eigenvectors();

  // joint distribution p(j, k) = || (<m_j| x P_k x 1) Psi ||^2
  std::vector<double> joint(4, 0.0);
  for (int j = 0; j < 2; ++j) {
    const Complex cj0 = std::conj(m[j][0]);  // <m_j|0>
    const Complex cj1 = std::conj(m[j][1]);  // <m_j|1>
    for (int k = 0; k < 2; ++k) {
      const Eigen::Vector2cd pk = pbasis.col(k);
      const Complex q0 = pk.dot(f0);  // <p_k|f0>
      const Complex q1 = pk.dot(f1);
      double p = std::norm(a) * std::norm(cj0) * std::norm(q0) +
                 std::norm(b) * std::norm(cj1) * std::norm(q1) +
                 2.0 * (a * std::conj(b) * cj0 * std::conj(cj1) * g.gamma_rest * q0 *
                        std::conj(q1))
                           .real();
      joint[static_cast<std::size_t>(2 * j + k)] = std::max(0.0, p);
    }
  }
  double total = joint[0] + joint[1] + joint[2] + joint[3];
  if (total <= 0.0) return 0.0;
  for (auto& v : joint) v /= total;

  const std::vector<double> pj{joint[0] + joint[1], joint[2] + joint[3]};
  const std::vector<double> pk{joint[0] + joint[2], joint[1] + joint[3]};
  return shannon_entropy(pj, unit) + shannon_entropy(pk, unit) - shannon_entropy(joint, unit);
}

ObservableRedundancy redundancy_of_observable(const BranchState& state, double mu, double delta,
                                              std::uint64_t seed) {
  if (delta <= 0.0 || delta >= 1.0)
    throw std::invalid_argument("redundancy_of_observable: delta must lie in (0, 1)");

  ObservableRedundancy out;
  out.mu = mu;
  out.delta = delta;

  // target: (1 - delta) * Shannon entropy of sigma(mu) outcomes on rho_S
  std::vector<int> all(static_cast<std::size_t>(state.n_env()));
  for (int k = 0; k < state.n_env(); ++k) all[static_cast<std::size_t>(k)] = k;
  const Complex gamma_all = decoherence_factor(state, all);
  const Complex a = state.a(), b = state.b();
  const double c = std::cos(mu / 2), s = std::sin(mu / 2);
  // p(m_j) = <m_j| rho_S |m_j>, rho_S = [[|a|^2, a b* G], [a* b G*, |b|^2]]
  const Complex off = a * std::conj(b) * gamma_all;
  const double p0 = std::norm(a) * c * c + std::norm(b) * s * s + 2.0 * c * s * off.real();
  const double h_obs = shannon_entropy({std::clamp(p0, 0.0, 1.0), std::clamp(1.0 - p0, 0.0, 1.0)},
                                       EntropyUnit::Bits);
  out.target_bits = (1.0 - delta) * h_obs;
  if (out.target_bits <= 0.0) {
    out.redundancy = 0;
    return out;
  }

  // seeded shuffle sets the tie-break order among equally informative spins
  Rng rng(mix64(seed ^ 0xda3e39cb94b95bdbULL));
  std::vector<int> order(static_cast<std::size_t>(state.n_env()));
  for (int k = 0; k < state.n_env(); ++k) order[static_cast<std::size_t>(k)] = k;
  for (int i = state.n_env() - 1; i > 0; --i)
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
  std::vector<bool> used(static_cast<std::size_t>(state.n_env()), false);
  int remaining = state.n_env();

  while (remaining > 0) {
    FragmentSpec frag;
    double info = 0.0;
    while (info < out.target_bits) {
      // greedy: next spin giving the largest information jump
      int best_spin = -1;
      double best_info = -1.0;
      for (int k : order) {
        if (used[static_cast<std::size_t>(k)]) continue;
        frag.push_back(k);
        const double v = observable_fragment_information(state, mu, frag, EntropyUnit::Bits);
        frag.pop_back();
        if (v > best_info + 1e-15) {
          best_info = v;
          best_spin = k;
        }
      }
      if (best_spin < 0) break;  // pool exhausted mid-fragment
      frag.push_back(best_spin);
      used[static_cast<std::size_t>(best_spin)] = true;
      --remaining;
      info = best_info;
    }
    if (info >= out.target_bits) {
      ++out.redundancy;
      out.fragment_sizes.push_back(static_cast<int>(frag.size()));
    } else {
      out.best_unreached = std::max(out.best_unreached, info);
      break;  // no more complete fragments possible
    }
  }
  return out;
}

DensityMatrix decohered_by_fragment(const BranchState& state, const FragmentSpec& fragment) {
  Complex gamma_f = 1.0;
  for (int k : fragment) gamma_f *= state.overlap(k);
  const Complex a = state.a(), b = state.b();
  Matrix rho(2, 2);
  rho << std::norm(a), a * std::conj(b) * gamma_f, std::conj(a) * b * std::conj(gamma_f),
      std::norm(b);
  return DensityMatrix(std::move(rho), SubsystemLayout({2}));
}

DensityMatrix decohered_by_fragment(const PureState& psi, int system_index,
                                    const Matrix& pointer_basis, const FragmentSpec& fragment) {
  const auto& layout = psi.layout();
  const int ds = layout.dim(system_index);
  if (pointer_basis.rows() != ds || pointer_basis.cols() != ds)
    throw std::invalid_argument("decohered_by_fragment: pointer basis side mismatch");
  if ((pointer_basis.adjoint() * pointer_basis - Matrix::Identity(ds, ds)).cwiseAbs().maxCoeff() >
      kAlgebraTol)
    throw std::invalid_argument("decohered_by_fragment: pointer basis not orthonormal");

  std::vector<int> env_dims;
  for (int k = 0; k < layout.subsystem_count(); ++k)
    if (k != system_index) env_dims.push_back(layout.dim(k));
  SubsystemLayout env_layout(env_dims, {}, layout.dimension_cap());

  std::vector<int> frag = fragment;  // indices into the environment-only layout
  std::sort(frag.begin(), frag.end());
  for (int e : frag)
    if (e < 0 || e >= env_layout.subsystem_count())
      throw std::invalid_argument("decohered_by_fragment: fragment index out of range");
  const bool frag_is_all = static_cast<int>(frag.size()) == env_layout.subsystem_count();

  // conditional environment states per pointer outcome
  Matrix env_m = bipartite_matrix(psi, {system_index});  // ds x d_env, rows in the S logical basis
  std::vector<Vector> f_part(static_cast<std::size_t>(ds));
  std::vector<double> p(static_cast<std::size_t>(ds), 0.0);
  for (int k = 0; k < ds; ++k) {
    Vector chi = Vector::Zero(env_m.cols());
    for (int r = 0; r < ds; ++r) chi += std::conj(pointer_basis(r, k)) * env_m.row(r).transpose();
    p[static_cast<std::size_t>(k)] = chi.squaredNorm();
    if (p[static_cast<std::size_t>(k)] < 1e-14 || frag.empty()) continue;

    // fragment part must be pure, i.e. the conditional factors across the cut
    PureState cond(chi / std::sqrt(p[static_cast<std::size_t>(k)]), env_layout);
    Matrix rho_f = frag_is_all ? Matrix(cond.amplitudes() * cond.amplitudes().adjoint())
                               : partial_trace(DensityMatrix::from_pure(cond), frag).matrix();
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_f);
    const Eigen::Index top = rho_f.rows() - 1;  // eigenvalues ascending
    if (es.eigenvalues()(top) < 1.0 - 1e-8)
      throw std::invalid_argument(
          "decohered_by_fragment: conditional environment state does not factor across the "
          "fragment cut (purity " +
          std::to_string(es.eigenvalues()(top)) + ")");
    Vector fk = es.eigenvectors().col(top);
    Eigen::Index j = 0;
    while (j < fk.size() && std::abs(fk(j)) < 1e-12) ++j;
    if (j < fk.size()) fk /= fk(j) / std::abs(fk(j));
    f_part[static_cast<std::size_t>(k)] = fk;
  }

  // [k,l] = sqrt(p_k p_l) <F_k|F_l>; per-branch phases are a convention
  // (a diagonal-unitary conjugation), fixed here by canonical eigenvectors
  Matrix rho = Matrix::Zero(ds, ds);
  for (int k = 0; k < ds; ++k) {
    if (p[static_cast<std::size_t>(k)] < 1e-14) continue;
    rho(k, k) = p[static_cast<std::size_t>(k)];
    for (int l = k + 1; l < ds; ++l) {
      if (p[static_cast<std::size_t>(l)] < 1e-14) continue;
      const Complex fo = frag.empty()
                             ? Complex(1.0)
                             : f_part[static_cast<std::size_t>(k)].dot(
                                   f_part[static_cast<std::size_t>(l)]);
      const Complex val =
          std::sqrt(p[static_cast<std::size_t>(k)] * p[static_cast<std::size_t>(l)]) * fo;
      rho(k, l) = val;
      rho(l, k) = std::conj(val);
    }
  }
  Matrix out = pointer_basis * rho * pointer_basis.adjoint();
  out = (out + Matrix(out.adjoint())) / 2.0;
  return DensityMatrix(std::move(out), SubsystemLayout({ds}, {}, layout.dimension_cap()));
}

}  // namespace qdsim
