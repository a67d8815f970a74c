#include "despeckle/ica.hpp"

namespace despeckle {

namespace {

// (1/P) sum_t w_t z_t z_t^T
Matrix weighted_scatter(const Matrix& z, const Eigen::RowVectorXd& weights) {
  const Matrix scaled = z.array().rowwise() * weights.array();
  return scaled * z.transpose() / static_cast<double>(z.cols());
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

Matrix quadricov_identity(const DataMatrix& Z) {
  const Matrix& z = Z.values();
  const Matrix R = z * z.transpose() / static_cast<double>(z.cols());
  const Eigen::RowVectorXd norms = z.colwise().squaredNorm();
  const Matrix C = weighted_scatter(z, norms) - 2.0 * R * R - R.trace() * R;
  return symmetrize(C);
}

Matrix quadricov_projected(const DataMatrix& Z, const Matrix& E) {
  const Matrix& z = Z.values();
  require(E.rows() == z.rows() && E.cols() == z.rows(),
          "projector dimension does not match the data");
  const Matrix R = z * z.transpose() / static_cast<double>(z.cols());
  const Eigen::RowVectorXd quad = (E * z).cwiseProduct(z).colwise().sum();
  const Matrix C = weighted_scatter(z, quad) - R * E * R - (E * R).trace() * R -
                   R * E.transpose() * R;
  return symmetrize(C);
}

}  // namespace despeckle
