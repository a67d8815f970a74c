#include "despeckle/jointdiag.hpp"
#include "separation_detail.hpp"

#include <cmath>

namespace despeckle {

UnmixingResult jade(const DataMatrix& X, const IcaConfig& cfg) {
  require(cfg.algorithm == Algorithm::Jade, "config is not a JADE config");
  cfg.validate();
  const auto start = detail::Clock::now();

  const Whitened w = whiten(X, cfg.drop_tol);
  const Matrix& z = w.data.values();
  const Eigen::Index d = z.rows();

  const Matrix CI = quadricov_identity(w.data);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(CI);
  const Matrix& basis = eig.eigenvectors();

  std::vector<Matrix> cumulants;
  cumulants.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index p = 0; p < d; ++p) {
    const Matrix E = basis.col(p) * basis.col(p).transpose();
    cumulants.push_back(quadricov_projected(w.data, E));
  }

  const JointDiagResult jd =
      joint_diagonalize(MatrixSet(std::move(cumulants)), {cfg.tol, cfg.max_iters});

  UnmixingResult out;
  detail::apply_rotation(out, jd.U, w);
  out.iterations = jd.sweeps;
  out.converged = jd.converged;

  // Standard error of the sample mean of (z^T z) z z^T, in Frobenius norm.
  const Eigen::ArrayXd norms = z.colwise().squaredNorm().transpose().array();
  const double spread = std::sqrt(norms.pow(4).mean());
  const double noise = spread / std::sqrt(static_cast<double>(z.cols()));
  if (CI.norm() < 10.0 * noise) {
    out.warnings.push_back("jade: fourth-order cumulants are within sampling noise; "
                           "sources look Gaussian and are poorly identifiable");
  }
  out.elapsed_seconds = detail::seconds_since(start);
  return out;
}

}  // namespace despeckle
