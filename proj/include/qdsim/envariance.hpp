#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qdsim/schmidt.hpp"
#include "qdsim/states.hpp"

namespace qdsim {

enum class SchmidtUnitaryKind { PhaseRotation, Swap };
enum class Side { Left, Right };

// A unitary diagonal (phase rotation) or a two-index permutation (swap) in
// the Schmidt basis of a designated side; identity on the orthocomplement.
struct SchmidtLocalUnitary {
  SchmidtUnitaryKind kind;
  Side side = Side::Left;
  std::vector<double> phases;  // PhaseRotation: phi_k per Schmidt term
  int k = 0, l = 0;            // Swap: the exchanged Schmidt indices

  static SchmidtLocalUnitary phase_rotation(std::vector<double> phis, Side s = Side::Left) {
    return {SchmidtUnitaryKind::PhaseRotation, s, std::move(phis), 0, 0};
  }
  static SchmidtLocalUnitary swap(int k, int l, Side s = Side::Left) {
    return {SchmidtUnitaryKind::Swap, s, {}, k, l};
  }
};

// Dense matrix of `u` on its side's factor space, built from a decomposition.
Matrix schmidt_unitary_matrix(const SchmidtDecomposition& dec, const SchmidtLocalUnitary& u);

// Swap of Schmidt terms k,l on one side together with the counterswap on the
// other side that undoes it for even coefficients. Both operators derive from
// one decomposition of the same state; under coefficient degeneracy the
// pairing cannot be re-derived from the transformed state alone.
struct SwapCounterswapPair {
  Matrix swap_left;        // acts on the cut side
  Matrix counterswap_right;  // acts on the complementary side
  std::vector<int> cut;
};

SwapCounterswapPair make_swap_pair(const PureState& psi, const std::vector<int>& cut, int k,
                                   int l);

// convenience wrappers deriving the operator from the given state's own
// decomposition
PureState schmidt_swap(const PureState& psi, const std::vector<int>& cut, int k, int l);
PureState schmidt_counterswap(const PureState& psi, const std::vector<int>& cut, int k, int l);

struct EnvarianceVerdict {
  bool envariant;
  double fidelity;                     // after the best counter-unitary
  std::optional<Matrix> counter_unitary;  // witness on the other side, if envariant
};

// Is psi envariant under `u` acting on one side of the cut? For phase
// rotations and swaps the witness is the canonical countertransformation; the
// verdict threshold is fidelity >= 1 - 1e-9, insensitive to global phase.
EnvarianceVerdict verify_envariance(const PureState& psi, const std::vector<int>& cut,
                                    const SchmidtLocalUnitary& u);

// General variant: best counter-unitary on the complementary side computed by
// polar decomposition of the overlap operator.
EnvarianceVerdict verify_envariance_general(const PureState& psi, const std::vector<int>& cut,
                                            const Matrix& u_left);

// Rational fine-graining plan: squared amplitudes m_k / M per Schmidt branch.
struct FineGrainPlan {
  std::vector<std::int64_t> counts;  // m_k, aligned with descending Schmidt terms
  std::int64_t total = 0;            // M = sum m_k

  FineGrainPlan(std::vector<std::int64_t> m, std::int64_t M);
};

// Convert psi (rational squared amplitudes per `plan`) into an even state of
// (S u C) vs E with M equal branches, using the controlled-not generalization
// |e_j>|c_0> -> |e_j>|c_j> between E (control) and a fresh ancilla C of
// dimension M. Output layout: S, C, E. Acts only on C and E, never on S.
PureState fine_grain_to_even(const PureState& psi, const std::vector<int>& cut,
                             const FineGrainPlan& plan);

struct BornProbability {
  std::int64_t numerator = 0;    // m_k
  std::int64_t denominator = 1;  // M
  double value = 0.0;            // m_k / M, or |a_k|^2 in continuity mode
};

struct BornResult {
  std::vector<BornProbability> probabilities;  // per descending Schmidt term
  bool rational = true;        // false: continuity fallback (no M <= bound fits)
  double approximation_error = 0.0;  // max |a_k|^2 - m_k/M|
};

// Probabilities of Schmidt outcomes by counting envariantly swappable
// fine-grained branches. Squared amplitudes are approximated by m_k / M with
// M <= denominator_bound to within `tolerance`; otherwise the continuity
// extension returns |a_k|^2 with rational=false.
BornResult born_probabilities(const PureState& psi, const std::vector<int>& cut,
                              std::int64_t denominator_bound = std::int64_t{1} << 20,
                              double tolerance = 1e-6);

struct FrequencyDistribution {
  std::vector<double> pmf;       // exact binomial, n = 0..N
  std::vector<double> gaussian;  // Gaussian approximation at the same n
  double mean = 0.0;             // p N
  double max_gaussian_error = 0.0;
  bool exact_rational = false;   // pmf entries were formed from exact integer counts
};

// Record statistics over N trials of a branch with probability p: exact
// binomial alongside its Gaussian approximation. When p = m/M is supplied as
// integers and M^N fits 128 bits, counts are exact integers.
FrequencyDistribution frequency_distribution(double p, int trials);
FrequencyDistribution frequency_distribution(std::int64_t m, std::int64_t M, int trials);

struct RepeatabilityCheck {
  bool consistent;
  double violation;
};

// |<sA|sB>| * |1 - <eA|eB>|, the pure-imprint repeatability constraint
RepeatabilityCheck repeatability_orthogonality_check(const PureState& sA, const PureState& sB,
                                                     const PureState& eA, const PureState& eB);

// |<sA|sB>|^2 * ((purity_A + purity_B)/2 - Re Tr rho_A rho_B); the second
// factor is half the squared Hilbert-Schmidt distance of the imprints
RepeatabilityCheck repeatability_orthogonality_check(const PureState& sA, const PureState& sB,
                                                     const DensityMatrix& eA,
                                                     const DensityMatrix& eB);

struct ChainOverlapResult {
  Complex product;                 // product of per-link overlaps
  std::vector<double> log_terms;   // ln |o_i|^2 per link
  double log_sum;                  // sum of log_terms
  double log_initial;              // ln |initial|^2
  bool consistent;                 // |product| <= |initial| + 1e-9
  double violation;                // max(0, |product| - |initial|)
};

// Unitarity bookkeeping for a von Neumann chain: the product of overlaps
// along the chain must reproduce the initial overlap, so record quality is
// limited by the distinguishability of what they record.
ChainOverlapResult chain_overlap_invariant(Complex initial_overlap,
                                           const std::vector<Complex>& per_link_overlaps);

}  // namespace qdsim
