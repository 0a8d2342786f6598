#pragma once

#include <vector>

#include "qdsim/states.hpp"

namespace qdsim {

// Schmidt form of a bipartite pure state: psi = sum_k c_k |L_k>|R_k> with
// c_k >= 0 descending. Phases are folded into the vector families; each left
// vector is canonicalized so its first nonzero component is real positive.
struct SchmidtDecomposition {
  std::vector<double> coefficients;   // descending, includes zero-padded terms
  Matrix left_vectors;                // columns, orthonormal, dim(left) x nterms
  Matrix right_vectors;               // columns, orthonormal, dim(right) x nterms
  std::vector<int> cut;               // left-side subsystem indices (sorted)
  SubsystemLayout layout;             // layout of the decomposed state

  int term_count() const { return static_cast<int>(coefficients.size()); }

  // sum_k c_k |L_k>|R_k| as a dense state over the original layout
  PureState reconstruct() const;
};

// Full decomposition across the cut; term count = min of the two side
// dimensions (zero-coefficient terms carry orthonormal basis completions).
SchmidtDecomposition schmidt_decompose(const PureState& psi, const std::vector<int>& cut);

}  // namespace qdsim
