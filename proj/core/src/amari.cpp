#include "despeckle/ica.hpp"

namespace despeckle {

double amari_index(const Matrix& W_total, const Matrix& A) {
  require(W_total.cols() == A.rows(), "W_total columns must match mixing rows");
  require(W_total.rows() == A.cols(), "Amari index needs a square global matrix");
  const Eigen::Index d = W_total.rows();
  require(d >= 1, "empty unmixing matrix");
  if (d == 1) return 0.0;

  const Matrix G = (W_total * A).cwiseAbs();
  require(G.allFinite(), "global matrix has non-finite entries");
  double total = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double m = G.row(i).maxCoeff();
    require(m > 0.0, "global matrix has a zero row");
    total += G.row(i).sum() / m - 1.0;
  }
  for (Eigen::Index j = 0; j < d; ++j) {
    const double m = G.col(j).maxCoeff();
    require(m > 0.0, "global matrix has a zero column");
    total += G.col(j).sum() / m - 1.0;
  }
  return total / (2.0 * static_cast<double>(d) * static_cast<double>(d - 1));
}

}  // namespace despeckle
