#pragma once

// Source generators and independent oracles shared by the unit and acceptance
// suites. Nothing here calls into the estimators it is used to check.

#include "despeckle/core.hpp"
#include "despeckle/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace fixtures {

using despeckle::Matrix;
using despeckle::Vector;

inline Matrix uniform_sources(Eigen::Index d, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-std::sqrt(3.0), std::sqrt(3.0));
  Matrix s(d, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < d; ++i) s(i, j) = u(rng);
  return s;
}

/// Unit-variance Laplacian rows.
inline Matrix laplace_sources(Eigen::Index d, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(1.0);
  std::bernoulli_distribution coin(0.5);
  Matrix s(d, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < d; ++i) s(i, j) = (coin(rng) ? 1.0 : -1.0) * e(rng) / std::sqrt(2.0);
  return s;
}

inline Matrix gaussian_sources(Eigen::Index d, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix s(d, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < d; ++i) s(i, j) = g(rng);
  return s;
}

inline Matrix rademacher_sources(Eigen::Index d, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  Matrix s(d, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < d; ++i) s(i, j) = coin(rng) ? 1.0 : -1.0;
  return s;
}

/// x_t = coef * x_{t-1} + e_t with Gaussian innovations.
inline Eigen::RowVectorXd ar1(double coef, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::RowVectorXd x(n);
  double prev = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) x(t) = prev = coef * prev + g(rng);
  return x;
}

inline Eigen::RowVectorXd sinusoid(double period, Eigen::Index n, double phase = 0.0) {
  Eigen::RowVectorXd x(n);
  for (Eigen::Index t = 0; t < n; ++t)
    x(t) = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period + phase);
  return x;
}

inline Matrix random_orthogonal(Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix A(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) A(i, j) = g(rng);
  Eigen::HouseholderQR<Matrix> qr(A);
  Matrix Q = qr.householderQ();
  return Q;
}

/// Random square mixing matrix U diag(s) V^T with singular values in [1, 10].
inline Matrix random_mixing(Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(1.0, 10.0);
  Vector sv(d);
  for (Eigen::Index i = 0; i < d; ++i) sv(i) = u(rng);
  return random_orthogonal(d, seed ^ 0xA5A5A5A5ULL) * sv.asDiagonal() *
         random_orthogonal(d, seed ^ 0x5A5A5A5AULL).transpose();
}

inline Matrix rotation2(double theta) {
  Matrix R(2, 2);
  R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return R;
}

/// Pearson correlation computed from scratch with two passes.
inline double pearson(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    ma += a(i);
    mb += b(i);
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    sab += (a(i) - ma) * (b(i) - mb);
    saa += (a(i) - ma) * (a(i) - ma);
    sbb += (b(i) - mb) * (b(i) - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

/// For every true source the best |correlation| over the estimates, with each
/// estimate used once (greedy matching on the largest remaining correlation).
inline std::vector<double> matched_correlations(const Matrix& truth, const Matrix& est) {
  const Eigen::Index d = truth.rows();
  Matrix c(d, est.rows());
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < est.rows(); ++j)
      c(i, j) = std::abs(pearson(truth.row(i), est.row(j)));
  std::vector<double> out(static_cast<std::size_t>(d), 0.0);
  std::vector<bool> row_used(static_cast<std::size_t>(d)), col_used(static_cast<std::size_t>(est.rows()));
  for (Eigen::Index k = 0; k < std::min(d, est.rows()); ++k) {
    double best = -1;
    Eigen::Index bi = 0, bj = 0;
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < est.rows(); ++j)
        if (!row_used[i] && !col_used[j] && c(i, j) > best) {
          best = c(i, j);
          bi = i;
          bj = j;
        }
    row_used[bi] = col_used[bj] = true;
    out[static_cast<std::size_t>(bi)] = best;
  }
  return out;
}

/// Distance of M from the nearest signed permutation after normalizing rows to
/// unit max-abs entry (0 for an exact signed scaled permutation).
inline double signed_permutation_distance(const Matrix& M) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Eigen::Index j;
    const double m = M.row(i).cwiseAbs().maxCoeff(&j);
    for (Eigen::Index k = 0; k < M.cols(); ++k)
      if (k != j) worst = std::max(worst, std::abs(M(i, k)) / m);
  }
  return worst;
}

/// Direct population covariance by explicit loops.
inline Matrix loop_covariance(const Matrix& X) {
  const Eigen::Index n = X.rows(), p = X.cols();
  Vector mean = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index t = 0; t < p; ++t) mean(i) += X(i, t);
    mean(i) /= static_cast<double>(p);
  }
  Matrix C = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double s = 0;
      for (Eigen::Index t = 0; t < p; ++t) s += (X(i, t) - mean(i)) * (X(j, t) - mean(j));
      C(i, j) = s / static_cast<double>(p);
    }
  return C;
}

/// Smooth, textured test image in [0.1, 0.9] for registration fixtures.
inline despeckle::Image smooth_pattern(Eigen::Index h, Eigen::Index w, std::uint64_t seed = 3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  struct Blob {
    double x, y, s, a;
  };
  std::vector<Blob> blobs;
  for (int k = 0; k < 24; ++k)
    blobs.push_back({u(rng) * static_cast<double>(w), u(rng) * static_cast<double>(h),
                     3.0 + 6.0 * u(rng), u(rng) - 0.5});
  Matrix px(h, w);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x) {
      double v = 0.5;
      for (const Blob& b : blobs) {
        const double dx = static_cast<double>(x) - b.x, dy = static_cast<double>(y) - b.y;
        v += 0.5 * b.a * std::exp(-(dx * dx + dy * dy) / (2.0 * b.s * b.s));
      }
      px(y, x) = std::clamp(v, 0.1, 0.9);
    }
  return despeckle::Image(std::move(px));
}

/// Integer circular shift: out(y, x) = in(y - dy, x - dx).
// Periodic band-limited noise: white Gaussian noise blurred with a wrapped
// Gaussian of width sigma, mapped into [0.1, 0.9].
inline despeckle::Image texture(Eigen::Index h, Eigen::Index w, std::uint64_t seed, double sigma = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Matrix noise(h, w);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x) noise(y, x) = n(rng);
  const auto r = static_cast<Eigen::Index>(std::ceil(3.0 * sigma));
  const auto kernel = [&](Eigen::Index d) { return std::exp(-0.5 * static_cast<double>(d * d) / (sigma * sigma)); };
  Matrix rows = Matrix::Zero(h, w), out = Matrix::Zero(h, w);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x)
      for (Eigen::Index d = -r; d <= r; ++d) rows(y, x) += kernel(d) * noise(y, ((x + d) % w + w) % w);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x)
      for (Eigen::Index d = -r; d <= r; ++d) out(y, x) += kernel(d) * rows(((y + d) % h + h) % h, x);
  out.array() -= out.mean();
  out /= out.cwiseAbs().maxCoeff();
  return despeckle::Image((0.5 + 0.4 * out.array()).matrix());
}

inline despeckle::Image wrap_shift(const despeckle::Image& img, int dx, int dy) {
  const Matrix& in = img.pixels();
  const Eigen::Index h = in.rows(), w = in.cols();
  Matrix out(h, w);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x)
      out(y, x) = in(((y - dy) % h + h) % h, ((x - dx) % w + w) % w);
  return despeckle::Image(std::move(out));
}

}  // namespace fixtures
