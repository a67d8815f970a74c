#include "despeckle/jointdiag.hpp"
#include "despeckle/error.hpp"

#include <cmath>

namespace despeckle {

namespace {

double symmetry_defect(const Matrix& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

double offdiag_sum(const std::vector<Matrix>& ms) {
  double e = 0.0;
  for (const Matrix& m : ms) e += m.squaredNorm() - m.diagonal().squaredNorm();
  return e;
}

}  // namespace

MatrixSet::MatrixSet(std::vector<Matrix> matrices) : matrices_(std::move(matrices)) {
  require(!matrices_.empty(), "matrix set is empty");
  const Eigen::Index d = matrices_.front().rows();
  require(d >= 1, "matrix set members must be non-empty");
  for (const Matrix& m : matrices_) {
    require(m.rows() == d && m.cols() == d, "matrix set members differ in dimension");
    require(m.allFinite(), "matrix set member has non-finite entries");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    require(symmetry_defect(m) <= 1e-10 * scale, "matrix set member is not symmetric");
  }
}

double offdiag_energy(const MatrixSet& set, const Matrix& U) {
  const Eigen::Index d = set.dim();
  require(U.rows() == d && U.cols() == d, "rotation dimension does not match matrix set");
  double e = 0.0;
  for (const Matrix& m : set.matrices()) {
    const Matrix r = U.transpose() * m * U;
    e += r.squaredNorm() - r.diagonal().squaredNorm();
  }
  return e;
}

JointDiagResult joint_diagonalize(const MatrixSet& set, const JointDiagOptions& opts) {
  require(opts.angle_tol > 0.0, "angle_tol must be positive");
  require(opts.max_sweeps >= 1, "max_sweeps must be at least 1");

  const Eigen::Index d = set.dim();
  std::vector<Matrix> work = set.matrices();
  JointDiagResult out;
  out.U = Matrix::Identity(d, d);
  out.energy_trace.push_back(offdiag_sum(work));

  while (out.sweeps < opts.max_sweeps) {
    ++out.sweeps;
    double largest = 0.0;
    for (Eigen::Index p = 0; p + 1 < d; ++p) {
      for (Eigen::Index q = p + 1; q < d; ++q) {
        // 2x2 Gram matrix of (M_pp - M_qq, M_pq + M_qp) across the set.
        double g11 = 0.0, g12 = 0.0, g22 = 0.0;
        for (const Matrix& m : work) {
          const double a = m(p, p) - m(q, q);
          const double b = m(p, q) + m(q, p);
          g11 += a * a;
          g12 += a * b;
          g22 += b * b;
        }
        const double ton = g11 - g22;
        const double toff = 2.0 * g12;
        const double theta = 0.5 * std::atan2(toff, ton + std::hypot(ton, toff));
        largest = std::max(largest, std::abs(theta));
        if (std::abs(theta) < opts.angle_tol) continue;

        const double c = std::cos(theta);
        const double s = std::sin(theta);
        for (Matrix& m : work) {
          // Columns then rows: m <- G^T m G with G = [[c, -s], [s, c]] on (p, q).
          for (Eigen::Index i = 0; i < d; ++i) {
            const double mp = m(i, p), mq = m(i, q);
            m(i, p) = c * mp + s * mq;
            m(i, q) = -s * mp + c * mq;
          }
          for (Eigen::Index j = 0; j < d; ++j) {
            const double mp = m(p, j), mq = m(q, j);
            m(p, j) = c * mp + s * mq;
            m(q, j) = -s * mp + c * mq;
          }
        }
        for (Eigen::Index i = 0; i < d; ++i) {
          const double up = out.U(i, p), uq = out.U(i, q);
          out.U(i, p) = c * up + s * uq;
          out.U(i, q) = -s * up + c * uq;
        }
      }
    }
    out.energy_trace.push_back(offdiag_sum(work));
    if (largest < opts.angle_tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace despeckle
