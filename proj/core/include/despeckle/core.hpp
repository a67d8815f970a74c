#pragma once

// Shared domain types and the second-order preprocessing every separation
// algorithm builds on: centering, covariance, whitening, lagged covariance.

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace despeckle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Observation matrix, one channel per row and one sample per column. For the
/// speckle pipeline a row is a vectorized B-scan and a column a pixel.
///
/// Construction validates that every entry is finite, that there is at least
/// one row and at least as many samples as channels. Whitened data reuses this
/// type, so a single retained channel is allowed.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values);

  const Matrix& values() const noexcept { return values_; }
  Eigen::Index channels() const noexcept { return values_.rows(); }
  Eigen::Index samples() const noexcept { return values_.cols(); }

 private:
  Matrix values_;
};

struct Centered {
  DataMatrix data;
  Vector means;
};

struct WhiteningResult {
  Matrix Q;       ///< d x N, maps centered observations to white channels
  Matrix Q_pinv;  ///< N x d
  Vector means;   ///< per-channel means removed before Q is applied
  Eigen::Index retained_dim = 0;
  Vector eigenvalues;  ///< covariance spectrum, descending, length N
};

struct Whitened {
  DataMatrix data;  ///< d x P, identity covariance
  WhiteningResult whitening;
};

/// Output of every separation algorithm.
struct UnmixingResult {
  Matrix W;        ///< d x d, acts on whitened data
  Matrix W_total;  ///< d x N, acts on centered observations
  Matrix sources;  ///< d x P
  Matrix mixing;   ///< N x d estimate of the mixing matrix
  int iterations = 0;
  bool converged = false;
  double elapsed_seconds = 0.0;
  std::vector<std::string> warnings;
};

inline constexpr double kDefaultDropTol = 1e-12;

Centered center(const DataMatrix& X);

/// Population covariance (1/P) Xc Xc^T of already centered data.
Matrix covariance(const DataMatrix& Xc);

/// Eigendecomposition whitening. Eigenpairs with lambda <= drop_tol * lambda_max
/// are discarded, so the output may have fewer channels than the input.
Whitened whiten(const DataMatrix& X, double drop_tol = kDefaultDropTol);

/// Symmetrized lag-p covariance (1/(P-p)) sum_t z(t) z(t-p)^T.
Matrix lagged_covariance(const DataMatrix& Z, Eigen::Index lag);

}  // namespace despeckle
