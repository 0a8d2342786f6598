#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qdsim/branch_state.hpp"
#include "qdsim/info_measures.hpp"
#include "qdsim/states.hpp"

namespace qdsim {

// Subset of environment subsystem indices.
using FragmentSpec = std::vector<int>;

// Source of I(S : F) values for fragment sampling; implementations exist for
// dense pure states, branch-form states, and Gaussian states.
class MutualInfoSource {
 public:
  virtual ~MutualInfoSource() = default;
  virtual int environment_size() const = 0;
  virtual double system_entropy(EntropyUnit unit) const = 0;
  virtual double mutual_information(const FragmentSpec& fragment, EntropyUnit unit) const = 0;
};

// Pure global state, one designated system subsystem, fragments drawn from
// the rest. Entropies come from Schmidt spectra of bipartitions, so large
// environments stay cheap.
class DensePureStateSource final : public MutualInfoSource {
 public:
  DensePureStateSource(PureState psi, int system_index);
  int environment_size() const override;
  double system_entropy(EntropyUnit unit) const override;
  double mutual_information(const FragmentSpec& fragment, EntropyUnit unit) const override;

 private:
  std::vector<int> env_subsystems(const FragmentSpec& fragment) const;
  PureState psi_;
  int system_;
};

class BranchStateSource final : public MutualInfoSource {
 public:
  explicit BranchStateSource(BranchState state) : state_(std::move(state)) {}
  int environment_size() const override { return state_.n_env(); }
  double system_entropy(EntropyUnit unit) const override {
    return branch_entropy_system(state_, unit);
  }
  double mutual_information(const FragmentSpec& fragment, EntropyUnit unit) const override {
    return branch_mutual_information(state_, fragment, unit);
  }
  const BranchState& state() const { return state_; }

 private:
  BranchState state_;
};

struct PIPPoint {
  double f = 0.0;        // fragment fraction of the environment
  double mean_info = 0.0;
  double stderr_info = 0.0;
  int n_samples = 0;
  bool exhaustive = false;  // all fragments of this size enumerated
};

struct PIPCurve {
  std::vector<PIPPoint> points;   // f strictly increasing
  int samples_per_f = 0;
  std::uint64_t seed = 0;
  std::string model;
  EntropyUnit unit = EntropyUnit::Bits;
  double system_entropy = 0.0;    // H(S) of the same state, same unit
};

// Average I(S : F) over random fragments of round(f N) subsystems for each
// requested fraction. Exhaustive when C(N, m) <= exhaustive_limit; otherwise
// samples_per_f subsets whose RNG streams derive from (seed, f, i), so any
// evaluation order gives identical output.
PIPCurve partial_information_plot(const MutualInfoSource& source,
                                  const std::vector<double>& fractions, int samples_per_f,
                                  std::uint64_t seed, EntropyUnit unit,
                                  std::int64_t exhaustive_limit = 1024);

struct RedundancyResult {
  double delta = 0.0;
  double f_delta = 0.0;          // smallest sampled fraction with I >= (1-delta) H(S)
  double r_delta = 0.0;          // 1 / f_delta
  double f_interpolated = 0.0;   // linear crossing between the bracketing samples
  double r_interpolated = 0.0;   // 1 / f_interpolated
  bool interpolated = false;     // true when the crossing fell between samples
};

// Find the information crossing I(S:F) = (1 - delta) H(S) on the curve.
// Throws when the sampled range does not bracket the crossing.
RedundancyResult redundancy_from_pip(const PIPCurve& curve, double delta);

struct ObservableRedundancy {
  double mu = 0.0;
  double delta = 0.0;
  int redundancy = 0;              // disjoint fragments reaching the target
  double target_bits = 0.0;        // (1 - delta) H(sigma(mu) outcomes)
  double best_unreached = 0.0;     // info of the last incomplete fragment (diagnostic)
  std::vector<int> fragment_sizes; // per completed fragment
};

// Fig.-5b-style scan: Shannon mutual information between sigma(mu) outcomes
// on S and a two-outcome measurement on F in the basis diagonalizing the
// weighted difference of the two conditional fragment states. Fragments are
// grown greedily from a seeded shuffle of the spins; each completed fragment
// is removed from the pool and counted.
ObservableRedundancy redundancy_of_observable(const BranchState& state, double mu, double delta,
                                              std::uint64_t seed);

// Shannon MI between sigma(mu) outcomes and the branch-discriminating
// measurement on `fragment` (all spins outside the fragment stay traced out).
double observable_fragment_information(const BranchState& state, double mu,
                                       const FragmentSpec& fragment, EntropyUnit unit);

// rho of S decohered by the fragment alone: off-diagonals in the pointer
// basis are damped by the fragment's record overlaps only.
DensityMatrix decohered_by_fragment(const BranchState& state, const FragmentSpec& fragment);

// Dense variant: pointer basis supplied explicitly on `system_index`; the
// conditional environment states must factor across the fragment / rest cut
// (branch-product structure), else this is not defined and throws.
DensityMatrix decohered_by_fragment(const PureState& psi, int system_index,
                                    const Matrix& pointer_basis, const FragmentSpec& fragment);

}  // namespace qdsim
