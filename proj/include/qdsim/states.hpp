#pragma once

#include <Eigen/Dense>
#include <complex>

#include "qdsim/layout.hpp"

namespace qdsim {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kStateTol = 1e-10;  // constructor validation
inline constexpr double kAlgebraTol = 1e-9; // algebraic identities

// Normalized dense state vector over a SubsystemLayout.
class PureState {
 public:
  PureState(Vector amplitudes, SubsystemLayout layout)
      : amps_(std::move(amplitudes)), layout_(std::move(layout)) {
    if (amps_.size() != layout_.total_dimension())
      throw std::invalid_argument("PureState: amplitude count does not match layout");
    const double n2 = amps_.squaredNorm();
    if (std::abs(n2 - 1.0) > kStateTol)
      throw std::invalid_argument("PureState: not normalized (|norm^2 - 1| = " +
                                  std::to_string(std::abs(n2 - 1.0)) + ")");
  }

  // computational basis state |index> over the layout
  static PureState basis(const SubsystemLayout& layout, std::int64_t index) {
    Vector v = Vector::Zero(layout.total_dimension());
    v(index) = 1.0;
    return PureState(std::move(v), layout);
  }

  const Vector& amplitudes() const { return amps_; }
  const SubsystemLayout& layout() const { return layout_; }

 private:
  Vector amps_;
  SubsystemLayout layout_;
};

// Hermitian, unit-trace, PSD matrix over a SubsystemLayout.
class DensityMatrix {
 public:
  DensityMatrix(Matrix matrix, SubsystemLayout layout)
      : mat_(std::move(matrix)), layout_(std::move(layout)) {
    const auto d = layout_.total_dimension();
    if (mat_.rows() != d || mat_.cols() != d)
      throw std::invalid_argument("DensityMatrix: matrix side does not match layout");
    if ((mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() > kStateTol)
      throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(mat_.trace().real() - 1.0) > kStateTol ||
        std::abs(mat_.trace().imag()) > kStateTol)
      throw std::invalid_argument("DensityMatrix: trace != 1");
    // PSD check via the smallest eigenvalue; layouts here are small enough
    // that this is affordable at construction time
    Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kStateTol)
      throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                  std::to_string(es.eigenvalues().minCoeff()));
  }

  static DensityMatrix from_pure(const PureState& psi) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint(), psi.layout());
  }

  const Matrix& matrix() const { return mat_; }
  const SubsystemLayout& layout() const { return layout_; }

 private:
  Matrix mat_;
  SubsystemLayout layout_;
};

inline double fidelity(const PureState& a, const PureState& b) {
  const Complex ov = a.amplitudes().dot(b.amplitudes());
  return std::norm(ov);
}

}  // namespace qdsim
