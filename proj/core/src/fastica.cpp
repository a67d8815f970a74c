#include "contrast_detail.hpp"

#include <chrono>
#include <random>

namespace despeckle {

namespace {

// W <- (W W^T)^(-1/2) W
Matrix symmetric_decorrelation(const Matrix& W) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(W * W.transpose());
  const Vector inv_sqrt = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  return eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose() * W;
}

Matrix random_orthogonal(Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix G(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) G(i, j) = normal(rng);
  return symmetric_decorrelation(G);
}

}  // namespace

UnmixingResult fastica(const DataMatrix& Z, const IcaConfig& cfg) {
  require(cfg.algorithm == Algorithm::FastIca, "config is not a FastICA config");
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  const Matrix& z = Z.values();
  const Eigen::Index d = z.rows();
  const double P = static_cast<double>(z.cols());

  Matrix W;
  if (cfg.initial_unmixing) {
    require(cfg.initial_unmixing->rows() == d && cfg.initial_unmixing->cols() == d,
            "initial unmixing matrix has wrong shape");
    W = symmetric_decorrelation(*cfg.initial_unmixing);
  } else {
    W = random_orthogonal(d, cfg.seed);
  }

  UnmixingResult out;
  Matrix g(d, z.cols());
  Vector gp_mean(d);
  for (int it = 1; it <= cfg.max_iters; ++it) {
    out.iterations = it;
    const Matrix y = W * z;
    gp_mean.setZero();
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      for (Eigen::Index i = 0; i < d; ++i) {
        const double v = y(i, j);
        g(i, j) = detail::contrast_derivative(cfg.contrast, v);
        gp_mean(i) += detail::contrast_second_derivative(cfg.contrast, v);
      }
    }
    gp_mean /= P;
    // Parallel fixed-point step w+ = E{z g(w^T z)} - E{g'(w^T z)} w for every row.
    Matrix next = g * z.transpose() / P - gp_mean.asDiagonal() * W;
    next = symmetric_decorrelation(next);

    // Rows pointing the same or the opposite way both count as settled.
    const double alignment = (next * W.transpose()).diagonal().cwiseAbs().minCoeff();
    W = std::move(next);
    if (1.0 - alignment < cfg.tol) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged)
    out.warnings.push_back("fastica: no convergence within " + std::to_string(cfg.max_iters) +
                           " iterations; sources may be non-separable");

  out.W = W;
  out.W_total = W;
  out.sources = W * z;
  out.mixing = W.transpose();
  out.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace despeckle
