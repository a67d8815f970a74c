#include "despeckle/jointdiag.hpp"
#include "separation_detail.hpp"

#include <cmath>

namespace despeckle {

UnmixingResult sobi(const DataMatrix& X, const IcaConfig& cfg) {
  require(cfg.algorithm == Algorithm::Sobi, "config is not a SOBI config");
  cfg.validate();
  require(!cfg.lags.empty(), "SOBI needs at least one lag");
  require(cfg.lags.back() < X.samples(), "SOBI lag exceeds the number of samples");
  const auto start = detail::Clock::now();

  const Whitened w = whiten(X, cfg.drop_tol);
  std::vector<Matrix> lagged;
  lagged.reserve(cfg.lags.size());
  double largest = 0.0;
  for (Eigen::Index p : cfg.lags) {
    lagged.push_back(lagged_covariance(w.data, p));
    largest = std::max(largest, lagged.back().cwiseAbs().maxCoeff());
  }

  const JointDiagResult jd =
      joint_diagonalize(MatrixSet(std::move(lagged)), {cfg.tol, cfg.max_iters});

  UnmixingResult out;
  detail::apply_rotation(out, jd.U, w);
  out.iterations = jd.sweeps;
  out.converged = jd.converged;

  // White channels have lagged covariances of order 1/sqrt(P - p).
  const double noise = 1.0 / std::sqrt(static_cast<double>(X.samples() - cfg.lags.back()));
  if (largest < 10.0 * noise) {
    out.converged = false;
    out.warnings.push_back("sobi: lagged covariances are indistinguishable from sampling noise; "
                           "sources look temporally white and are not separable");
  }
  out.elapsed_seconds = detail::seconds_since(start);
  return out;
}

}  // namespace despeckle
