#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qdsim/darwinism.hpp"
#include "qdsim/info_measures.hpp"

namespace qdsim {

using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Gaussian state of (system, bands...) in hbar = 1 units, canonical ordering
// (x_S, p_S, x_1, p_1, ...). Validity: cov + (i/2) Omega >= 0, equivalently
// every symplectic eigenvalue >= 1/2.
struct GaussianState {
  RealVector mean;
  RealMatrix covariance;

  int mode_count() const { return static_cast<int>(mean.size()) / 2; }
  void validate(double tol = 1e-8) const;
};

// standard symplectic form, blocks [[0, 1], [-1, 0]] per mode
RealMatrix symplectic_form(int modes);

// positive symplectic eigenvalues of a covariance matrix (nu >= 1/2 for
// physical states), computed from the skew spectrum of L^T Omega L
std::vector<double> symplectic_eigenvalues(const RealMatrix& covariance);

// a = 2 nu for a single mode; for a 2n x 2n reduced covariance this is the
// product of the per-mode areas, prod 2 nu_j
double symplectic_area(const RealMatrix& covariance);

// H(a) = ((a+1) ln(a+1) - (a-1) ln(a-1))/2 - ln 2, in nats by default;
// a in [1 - 1e-8, 1) clips to 1, below that is an invalid state
double gaussian_entropy_from_area(double a, EntropyUnit unit = EntropyUnit::Nats);

// multi-mode entropy: sum of per-symplectic-eigenvalue contributions
double gaussian_entropy(const RealMatrix& covariance, EntropyUnit unit = EntropyUnit::Nats);

struct OhmicBathSpec {
  double cutoff = 16.0;       // Lambda
  double band_width = 0.1;    // Delta omega
  double coupling = 0.025;    // gamma_0
  double band_mass = 1.0;     // M_omega
  std::vector<double> band_frequencies;  // band centers (midpoints)
  std::vector<double> band_couplings;    // C_omega per band

  int band_count() const { return static_cast<int>(band_frequencies.size()); }
  double recurrence_time() const { return 2.0 * 3.14159265358979323846 / band_width; }
};

// Sharp-cutoff ohmic bath I(omega) = (2 m_S gamma_0 / pi) omega discretized
// into ceil(Lambda / Delta omega) bands at midpoint frequencies with
// couplings C^2 = (4 m_S M gamma_0 / pi) omega^2 Delta omega.
OhmicBathSpec discretize_ohmic_bath(double cutoff, double band_width, double coupling,
                                    double system_mass, double band_mass = 1.0);

enum class SqueezeAxis { X, P };

struct QBMModel {
  double system_mass = 1000.0;
  double system_frequency = 4.0;  // Omega_0
  OhmicBathSpec bath;
  double squeezing = 1.0;         // s; 1 = ground state
  SqueezeAxis squeeze_axis = SqueezeAxis::X;

  int mode_count() const { return 1 + bath.band_count(); }
};

// system squeezed (x: Dx^2 = 1/(2 m w s), Dp^2 = m w s / 2), bath in its
// ground state, zero means
GaussianState initial_state(const QBMModel& model);

// quadratic-Hamiltonian matrix h with H = z^T h z / 2 (plus the bilinear
// coupling), so that zdot = Omega h z
RealMatrix hamiltonian_matrix(const QBMModel& model);

// propagate by the exact symplectic matrix S(t) = exp(t Omega h)
GaussianState evolve_gaussian(const QBMModel& model, const GaussianState& state, double t);

// max-norm deviation of S(t) Omega S(t)^T from Omega
double symplectic_drift(const QBMModel& model, double t);

// total quadratic energy <H> = tr(h cov)/2 + mean^T h mean / 2
double mean_energy(const QBMModel& model, const GaussianState& state);

// I(S : F) provider over bath-band fragments of an evolved state; entropies
// in nats from reduced-covariance symplectic spectra
class GaussianStateSource final : public MutualInfoSource {
 public:
  explicit GaussianStateSource(GaussianState state);
  int environment_size() const override;
  double system_entropy(EntropyUnit unit) const override;
  double mutual_information(const FragmentSpec& fragment, EntropyUnit unit) const override;

 private:
  RealMatrix reduced(const std::vector<int>& modes) const;  // mode indices, 0 = system
  GaussianState state_;
};

// PIP over random band subsets of the state at time t
PIPCurve qbm_partial_information(const QBMModel& model, double t,
                                 const std::vector<double>& fractions, int samples_per_f,
                                 std::uint64_t seed);

struct QBMRedundancy {
  RedundancyResult result;
  double system_entropy_nats = 0.0;
  double predicted = 0.0;  // e^{2 delta H_S}
  double ratio = 0.0;      // measured (interpolated) / predicted
};

QBMRedundancy qbm_redundancy(const QBMModel& model, double t, double delta,
                             const std::vector<double>& fractions, int samples_per_f,
                             std::uint64_t seed);

}  // namespace qdsim
