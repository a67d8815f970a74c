#pragma once

#include "despeckle/core.hpp"

#include <vector>

namespace despeckle {

/// Non-empty set of equally sized real symmetric matrices.
class MatrixSet {
 public:
  explicit MatrixSet(std::vector<Matrix> matrices);

  const std::vector<Matrix>& matrices() const noexcept { return matrices_; }
  Eigen::Index dim() const noexcept { return matrices_.front().rows(); }
  std::size_t size() const noexcept { return matrices_.size(); }

 private:
  std::vector<Matrix> matrices_;
};

/// Sum over the set of squared off-diagonal entries of U^T M_k U.
double offdiag_energy(const MatrixSet& set, const Matrix& U);

struct JointDiagOptions {
  double angle_tol = 1e-8;  ///< radians
  int max_sweeps = 100;
};

struct JointDiagResult {
  Matrix U;
  int sweeps = 0;
  bool converged = false;
  /// offdiag_energy before the first sweep followed by one entry per sweep.
  std::vector<double> energy_trace;
};

/// Orthogonal joint approximate diagonalization by Jacobi sweeps. Each Givens
/// angle is the closed-form minimizer of the pair's off-diagonal energy summed
/// over the whole set, taken in [-pi/4, pi/4].
JointDiagResult joint_diagonalize(const MatrixSet& set, const JointDiagOptions& opts = {});

}  // namespace despeckle
