#pragma once

#include <cstdint>
#include <vector>

#include "qdsim/states.hpp"

namespace qdsim {

// Kronecker product of two states; layout is the concatenation of layouts.
PureState tensor_product(const PureState& a, const PureState& b);

// Trace out all subsystems not in `keep`. `keep` must be a nonempty strict
// subset of subsystem indices; result keeps them in original order.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

// partial trace taken directly from a pure state (no full density matrix
// materialized); keep may be the full index set
DensityMatrix reduced_density(const PureState& psi, const std::vector<int>& keep);

// Reorder subsystems; `order` lists old indices in their new positions.
PureState permute_subsystems(const PureState& psi, const std::vector<int>& order);

// Reshape psi into a (dim(left) x dim(rest)) matrix, left subsystems indexing
// rows in the given order. Basis of the row/column spaces is the row-major
// computational basis of the respective sub-layouts.
Matrix bipartite_matrix(const PureState& psi, const std::vector<int>& left);

// Apply `u` to the listed target subsystems (identity elsewhere). `u` must be
// unitary within 1e-10 and match the product of target dims in the given
// order.
PureState apply_local_unitary(const PureState& psi, const Matrix& u,
                              const std::vector<int>& targets);

// Haar-distributed pure state, reproducible per seed.
PureState haar_random_state(const SubsystemLayout& layout, std::uint64_t seed);

// Squared Schmidt coefficients across the cut (left = `left` subsystems):
// eigenvalues of the marginal on either side, descending. Computed from the
// singular values of the reshaped amplitude matrix, so it stays cheap even
// when one side is large.
std::vector<double> marginal_spectrum(const PureState& psi, const std::vector<int>& left);

// sorted complement of `subset` within [0, n)
std::vector<int> complement_of(const std::vector<int>& subset, int n);

}  // namespace qdsim
