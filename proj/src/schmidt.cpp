#include "qdsim/schmidt.hpp"

#include <Eigen/SVD>
#include <algorithm>

#include "qdsim/qstate_ops.hpp"

namespace qdsim {

SchmidtDecomposition schmidt_decompose(const PureState& psi, const std::vector<int>& cut) {
  std::vector<int> left = cut;
  std::sort(left.begin(), left.end());
  Matrix m = bipartite_matrix(psi, left);

  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Index n = svd.singularValues().size();

  SchmidtDecomposition out;
  out.cut = left;
  out.layout = psi.layout();
  out.coefficients.resize(static_cast<std::size_t>(n));
  out.left_vectors = svd.matrixU();
  // m = U S V^dagger and psi = sum_k s_k |u_k> |conj(v_k)>
  out.right_vectors = svd.matrixV().conjugate();

  for (Eigen::Index k = 0; k < n; ++k) {
    out.coefficients[static_cast<std::size_t>(k)] = svd.singularValues()(k);
    // canonical phase: first nonzero component of each left vector real positive
    Eigen::Index j = 0;
    while (j < out.left_vectors.rows() && std::abs(out.left_vectors(j, k)) < 1e-12) ++j;
    if (j < out.left_vectors.rows()) {
      const Complex z = out.left_vectors(j, k);
      const Complex phase = z / std::abs(z);
      out.left_vectors.col(k) /= phase;
      out.right_vectors.col(k) *= phase;
    }
  }
  return out;
}

PureState SchmidtDecomposition::reconstruct() const {
  const std::int64_t dl = left_vectors.rows();
  const std::int64_t dr = right_vectors.rows();
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m =
      Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Zero(dl, dr);
  for (int k = 0; k < term_count(); ++k)
    m += coefficients[static_cast<std::size_t>(k)] * left_vectors.col(k) *
         right_vectors.col(k).transpose();

  // rebuild the (left..., right...) permuted state, then undo the permutation
  const auto right = complement_of(cut, layout.subsystem_count());
  std::vector<int> perm_order = cut;
  perm_order.insert(perm_order.end(), right.begin(), right.end());

  std::vector<int> perm_dims;
  for (int k : perm_order) perm_dims.push_back(layout.dim(k));
  SubsystemLayout perm_layout(perm_dims, {}, layout.dimension_cap());
  Vector flat = Eigen::Map<const Vector>(m.data(), dl * dr);
  // normalize away the accumulated roundoff so PureState validation is strict
  flat /= flat.norm();
  PureState permuted(std::move(flat), perm_layout);

  // inverse permutation
  std::vector<int> inv(perm_order.size());
  for (std::size_t p = 0; p < perm_order.size(); ++p)
    inv[static_cast<std::size_t>(perm_order[p])] = static_cast<int>(p);
  return permute_subsystems(permuted, inv);
}

}  // namespace qdsim
