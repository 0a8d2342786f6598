#include "qdsim/qstate_ops.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <set>

#include "qdsim/rng.hpp"

namespace qdsim {

namespace {

void check_subsystem_indices(const SubsystemLayout& layout, const std::vector<int>& idx) {
  std::set<int> seen;
  for (int k : idx) {
    if (k < 0 || k >= layout.subsystem_count())
      throw std::invalid_argument("subsystem index out of range: " + std::to_string(k));
    if (!seen.insert(k).second)
      throw std::invalid_argument("duplicate subsystem index: " + std::to_string(k));
  }
}

}  // namespace

std::vector<int> complement_of(const std::vector<int>& subset, int n) {
  std::vector<bool> in(static_cast<std::size_t>(n), false);
  for (int k : subset) in[static_cast<std::size_t>(k)] = true;
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n) - subset.size());
  for (int k = 0; k < n; ++k)
    if (!in[static_cast<std::size_t>(k)]) out.push_back(k);
  return out;
}

PureState tensor_product(const PureState& a, const PureState& b) {
  std::vector<int> dims = a.layout().dims();
  dims.insert(dims.end(), b.layout().dims().begin(), b.layout().dims().end());
  std::vector<std::string> labels;
  if (!a.layout().labels().empty() || !b.layout().labels().empty()) {
    auto la = a.layout().labels(), lb = b.layout().labels();
    la.resize(a.layout().dims().size());
    lb.resize(b.layout().dims().size());
    labels = la;
    labels.insert(labels.end(), lb.begin(), lb.end());
  }
  SubsystemLayout layout(dims, labels,
                         std::max(a.layout().dimension_cap(), b.layout().dimension_cap()));
  const auto db = b.layout().total_dimension();
  Vector out(layout.total_dimension());
  for (std::int64_t i = 0; i < a.layout().total_dimension(); ++i)
    out.segment(i * db, db) = a.amplitudes()(i) * b.amplitudes();
  return PureState(std::move(out), std::move(layout));
}

PureState permute_subsystems(const PureState& psi, const std::vector<int>& order) {
  const auto& layout = psi.layout();
  const int n = layout.subsystem_count();
  if (static_cast<int>(order.size()) != n)
    throw std::invalid_argument("permute_subsystems: order must list every subsystem");
  check_subsystem_indices(layout, order);

  std::vector<int> new_dims(order.size());
  for (std::size_t p = 0; p < order.size(); ++p)
    new_dims[p] = layout.dim(order[p]);
  SubsystemLayout new_layout(new_dims, {}, layout.dimension_cap());

  const auto old_strides = layout.strides();
  const auto new_strides = new_layout.strides();
  // stride of old subsystem `order[p]` in the new index
  std::vector<std::int64_t> map_stride(order.size());
  std::vector<std::int64_t> old_stride_of(order.size());
  for (std::size_t p = 0; p < order.size(); ++p) {
    map_stride[p] = new_strides[p];
    old_stride_of[p] = old_strides[static_cast<std::size_t>(order[p])];
  }

  Vector out(new_layout.total_dimension());
  std::vector<int> digits(static_cast<std::size_t>(n), 0);
  std::int64_t old_index = 0, new_index = 0;
  const std::int64_t total = layout.total_dimension();
  for (std::int64_t count = 0;; ++count) {
    out(new_index) = psi.amplitudes()(old_index);
    if (count + 1 == total) break;
    // odometer increment over the new layout's digits
    for (int p = n - 1; p >= 0; --p) {
      const auto sp = static_cast<std::size_t>(p);
      ++digits[sp];
      new_index += new_strides[sp];
      old_index += old_stride_of[sp];
      if (digits[sp] < new_dims[sp]) break;
      new_index -= new_strides[sp] * new_dims[sp];
      old_index -= old_stride_of[sp] * new_dims[sp];
      digits[sp] = 0;
    }
  }
  return PureState(std::move(out), std::move(new_layout));
}

Matrix bipartite_matrix(const PureState& psi, const std::vector<int>& left) {
  const auto& layout = psi.layout();
  check_subsystem_indices(layout, left);
  if (left.empty() || static_cast<int>(left.size()) == layout.subsystem_count())
    throw std::invalid_argument("bipartite_matrix: cut must split the layout in two");
  std::vector<int> order = left;
  const auto right = complement_of(left, layout.subsystem_count());
  order.insert(order.end(), right.begin(), right.end());
  PureState perm = permute_subsystems(psi, order);
  const std::int64_t dl = layout.product_dim(left);
  const std::int64_t dr = layout.total_dimension() / dl;
  // row-major reshape of the permuted amplitudes
  return Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(perm.amplitudes().data(), dl, dr);
}

DensityMatrix reduced_density(const PureState& psi, const std::vector<int>& keep) {
  const auto& layout = psi.layout();
  check_subsystem_indices(layout, keep);
  if (keep.empty()) throw std::invalid_argument("reduced_density: empty keep set");
  std::vector<int> keep_sorted = keep;
  std::sort(keep_sorted.begin(), keep_sorted.end());
  std::vector<int> kept_dims;
  for (int k : keep_sorted) kept_dims.push_back(layout.dim(k));
  SubsystemLayout out_layout(kept_dims, {}, layout.dimension_cap());
  if (static_cast<int>(keep_sorted.size()) == layout.subsystem_count()) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint(), out_layout);
  }
  Matrix m = bipartite_matrix(psi, keep_sorted);
  Matrix rho = m * m.adjoint();
  rho = (rho + Matrix(rho.adjoint())) / 2.0;  // shave numerical asymmetry
  return DensityMatrix(std::move(rho), std::move(out_layout));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
  const auto& layout = rho.layout();
  check_subsystem_indices(layout, keep);
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
  if (static_cast<int>(keep.size()) == layout.subsystem_count())
    throw std::invalid_argument("partial_trace: keep set must be a strict subset");

  std::vector<int> keep_sorted = keep;
  std::sort(keep_sorted.begin(), keep_sorted.end());
  const auto traced = complement_of(keep_sorted, layout.subsystem_count());

  std::vector<int> kept_dims;
  for (int k : keep_sorted) kept_dims.push_back(layout.dim(k));
  SubsystemLayout out_layout(kept_dims, {}, layout.dimension_cap());

  const auto strides = layout.strides();
  const std::int64_t dk = out_layout.total_dimension();
  const std::int64_t dt = layout.total_dimension() / dk;

  // global index of a (kept digits, traced digits) pair
  auto embed = [&](std::int64_t sub, const std::vector<int>& subsystems) {
    std::int64_t g = 0;
    for (int p = static_cast<int>(subsystems.size()) - 1; p >= 0; --p) {
      const int s = subsystems[static_cast<std::size_t>(p)];
      const int d = layout.dim(s);
      g += (sub % d) * strides[static_cast<std::size_t>(s)];
      sub /= d;
    }
    return g;
  };

  std::vector<std::int64_t> kept_base(static_cast<std::size_t>(dk));
  for (std::int64_t i = 0; i < dk; ++i) kept_base[static_cast<std::size_t>(i)] = embed(i, keep_sorted);
  std::vector<std::int64_t> traced_base(static_cast<std::size_t>(dt));
  for (std::int64_t t = 0; t < dt; ++t) traced_base[static_cast<std::size_t>(t)] = embed(t, traced);

  Matrix out = Matrix::Zero(dk, dk);
  for (std::int64_t i = 0; i < dk; ++i)
    for (std::int64_t j = 0; j < dk; ++j) {
      Complex acc = 0.0;
      for (std::int64_t t = 0; t < dt; ++t)
        acc += rho.matrix()(kept_base[static_cast<std::size_t>(i)] + traced_base[static_cast<std::size_t>(t)],
                            kept_base[static_cast<std::size_t>(j)] + traced_base[static_cast<std::size_t>(t)]);
      out(i, j) = acc;
    }
  out = (out + Matrix(out.adjoint())) / 2.0;
  return DensityMatrix(std::move(out), std::move(out_layout));
}

PureState apply_local_unitary(const PureState& psi, const Matrix& u,
                              const std::vector<int>& targets) {
  const auto& layout = psi.layout();
  check_subsystem_indices(layout, targets);
  if (targets.empty()) throw std::invalid_argument("apply_local_unitary: no targets");
  const std::int64_t du = layout.product_dim(targets);
  if (u.rows() != du || u.cols() != du)
    throw std::invalid_argument("apply_local_unitary: unitary side " + std::to_string(u.rows()) +
                                " does not match target dimension " + std::to_string(du));
  if ((u.adjoint() * u - Matrix::Identity(du, du)).cwiseAbs().maxCoeff() > kStateTol)
    throw std::invalid_argument("apply_local_unitary: matrix is not unitary");

  const auto strides = layout.strides();
  std::vector<std::int64_t> t_stride;
  for (int k : targets) t_stride.push_back(strides[static_cast<std::size_t>(k)]);

  // offsets of every assignment of the target digits
  std::vector<std::int64_t> t_offset(static_cast<std::size_t>(du));
  for (std::int64_t v = 0; v < du; ++v) {
    std::int64_t rem = v, off = 0;
    for (int p = static_cast<int>(targets.size()) - 1; p >= 0; --p) {
      const int d = layout.dim(targets[static_cast<std::size_t>(p)]);
      off += (rem % d) * t_stride[static_cast<std::size_t>(p)];
      rem /= d;
    }
    t_offset[static_cast<std::size_t>(v)] = off;
  }

  // offsets of every assignment of the non-target digits
  const auto rest = complement_of([&] {
    std::vector<int> t = targets;
    std::sort(t.begin(), t.end());
    return t;
  }(), layout.subsystem_count());
  std::int64_t dr = 1;
  for (int k : rest) dr *= layout.dim(k);
  std::vector<std::int64_t> r_offset(static_cast<std::size_t>(dr));
  for (std::int64_t v = 0; v < dr; ++v) {
    std::int64_t rem = v, off = 0;
    for (int p = static_cast<int>(rest.size()) - 1; p >= 0; --p) {
      const int d = layout.dim(rest[static_cast<std::size_t>(p)]);
      off += (rem % d) * strides[static_cast<std::size_t>(rest[static_cast<std::size_t>(p)])];
      rem /= d;
    }
    r_offset[static_cast<std::size_t>(v)] = off;
  }

  Vector out = psi.amplitudes();
  Vector gather(du);
  for (std::int64_t r = 0; r < dr; ++r) {
    const std::int64_t base = r_offset[static_cast<std::size_t>(r)];
    for (std::int64_t v = 0; v < du; ++v)
      gather(v) = out(base + t_offset[static_cast<std::size_t>(v)]);
    Vector res = u * gather;
    for (std::int64_t v = 0; v < du; ++v)
      out(base + t_offset[static_cast<std::size_t>(v)]) = res(v);
  }
  return PureState(std::move(out), layout);
}

PureState haar_random_state(const SubsystemLayout& layout, std::uint64_t seed) {
  Rng rng(mix64(seed ^ 0x243f6a8885a308d3ULL));
  Vector v(layout.total_dimension());
  for (std::int64_t i = 0; i < v.size(); ++i) {
    const double re = rng.normal();
    const double im = rng.normal();
    v(i) = Complex(re, im);
  }
  v /= v.norm();
  return PureState(std::move(v), layout);
}

std::vector<double> marginal_spectrum(const PureState& psi, const std::vector<int>& left) {
  Matrix m = bipartite_matrix(psi, left);
  // eigenvalues of the Gram matrix on the thin side; much cheaper than an
  // SVD and exact enough for entropies (the 1e-12 floor swallows the
  // squared-sigma precision loss)
  Matrix gram = m.rows() <= m.cols() ? Matrix(m * m.adjoint()) : Matrix(m.adjoint() * m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(es.eigenvalues().size()));
  for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i)
    out.push_back(std::max(0.0, es.eigenvalues()(i)));
  return out;
}

}  // namespace qdsim
