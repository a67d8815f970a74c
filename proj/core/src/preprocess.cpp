#include "despeckle/core.hpp"
#include "despeckle/error.hpp"


namespace despeckle {

Centered center(const DataMatrix& X) {
  const Matrix& v = X.values();
  Vector means = v.rowwise().mean();
  Matrix centered = v.colwise() - means;
  // A second pass removes the rounding residue of the first mean.
  const Vector residue = centered.rowwise().mean();
  centered.colwise() -= residue;
  means += residue;
  return {DataMatrix(std::move(centered)), std::move(means)};
}

Matrix covariance(const DataMatrix& Xc) {
  const Matrix& v = Xc.values();
  Matrix C = Matrix::Zero(v.rows(), v.rows());
  C.selfadjointView<Eigen::Lower>().rankUpdate(v);
  C = C.selfadjointView<Eigen::Lower>();
  C /= static_cast<double>(v.cols());
  return C;
}

Whitened whiten(const DataMatrix& X, double drop_tol) {
  require(drop_tol > 0.0 && drop_tol < 1.0, "drop_tol must lie in (0, 1)");
  Centered c = center(X);
  const Matrix C = covariance(c.data);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(C);
  if (eig.info() != Eigen::Success)
    fail(ErrorKind::DegenerateInput, "covariance eigendecomposition failed");

  // Eigen returns ascending eigenvalues; reorder descending.
  const Eigen::Index n = C.rows();
  Vector lambda = eig.eigenvalues().reverse();
  Matrix E = eig.eigenvectors().rowwise().reverse();

  const double lambda_max = lambda(0);
  if (!(lambda_max >= 1e-300))
    fail(ErrorKind::DegenerateInput, "covariance is numerically zero");

  Eigen::Index d = 0;
  while (d < n && lambda(d) > drop_tol * lambda_max) ++d;

  const Vector kept = lambda.head(d);
  const Matrix Ek = E.leftCols(d);
  WhiteningResult w;
  w.Q = kept.cwiseSqrt().cwiseInverse().asDiagonal() * Ek.transpose();
  w.Q_pinv = Ek * kept.cwiseSqrt().asDiagonal();
  w.means = std::move(c.means);
  w.retained_dim = d;
  w.eigenvalues = std::move(lambda);

  Matrix Z = w.Q * c.data.values();
  return {DataMatrix(std::move(Z)), std::move(w)};
}

Matrix lagged_covariance(const DataMatrix& Z, Eigen::Index lag) {
  const Matrix& z = Z.values();
  const Eigen::Index P = z.cols();
  require(lag >= 0 && lag < P, "lag must satisfy 0 <= lag < number of samples");
  const Eigen::Index count = P - lag;
  Matrix R = z.rightCols(count) * z.leftCols(count).transpose();
  R /= static_cast<double>(count);
  Matrix S = 0.5 * (R + R.transpose());
  return S;
}

}  // namespace despeckle
