#include "despeckle/ica.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

namespace despeckle {

namespace {

constexpr double kMaxCondition = 1e12;

// Per-unit switch for the extended rule: +1 super-Gaussian, -1 sub-Gaussian.
Vector kurtosis_signs(const Matrix& u) {
  const Eigen::ArrayXXd t = u.array().tanh();
  const Eigen::ArrayXd sech2 = (1.0 - t.square()).rowwise().mean();
  const Eigen::ArrayXd second = u.array().square().rowwise().mean();
  const Eigen::ArrayXd cross = (t * u.array()).rowwise().mean();
  const Eigen::ArrayXd k = sech2 * second - cross;
  return (k >= 0.0).select(Eigen::ArrayXd::Ones(k.size()), -Eigen::ArrayXd::Ones(k.size()));
}

}  // namespace

UnmixingResult infomax(const DataMatrix& Z, const IcaConfig& cfg) {
  require(cfg.algorithm == Algorithm::InfoMax, "config is not an InfoMax config");
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  const Matrix& z = Z.values();
  const Eigen::Index d = z.rows();
  const Eigen::Index P = z.cols();
  const Eigen::Index batch = std::min<Eigen::Index>(cfg.batch_size, P);

  Matrix W = cfg.initial_unmixing.value_or(Matrix::Identity(d, d));
  require(W.rows() == d && W.cols() == d, "initial unmixing matrix has wrong shape");
  Vector bias = Vector::Zero(d);
  double rate = cfg.learning_rate.value_or(0.01 / std::log(static_cast<double>(d) + 1.0));

  std::mt19937_64 rng(cfg.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(P));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  UnmixingResult out;
  if (d == 1) {
    // A single white channel is already its own source; the rule would only rescale it.
    out.W = Matrix::Identity(1, 1);
    out.W_total = out.W;
    out.sources = z;
    out.mixing = out.W;
    out.converged = true;
    out.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  }
  Matrix last_stable = W;
  double previous_update = std::numeric_limits<double>::infinity();
  Vector signs = Vector::Ones(d);
  Matrix x(d, batch);

  // Score term of the rule; the logistic bias learns only on mini-batches.
  const auto score_of = [&](const Matrix& data, bool learn_bias) {
    Matrix u = W * data;
    if (cfg.extended) return Matrix(-(signs.asDiagonal() * u.array().tanh().matrix() + u));
    u.colwise() += bias;
    // 1 - 2 * logistic(u) == -tanh(u / 2)
    Matrix score = -(0.5 * u.array()).tanh().matrix();
    if (learn_bias) bias += rate * score.rowwise().mean();
    return score;
  };
  const auto inverse_transpose = [&](int epoch) {
    Eigen::PartialPivLU<Matrix> lu(W.transpose());
    if (!(lu.rcond() * kMaxCondition > 1.0))
      throw DivergenceError("weight matrix became singular", last_stable, epoch);
    return Matrix(lu.inverse());
  };

  for (int epoch = 1; epoch <= cfg.max_iters; ++epoch) {
    out.iterations = epoch;
    std::shuffle(order.begin(), order.end(), rng);
    if (cfg.extended) signs = kurtosis_signs(W * z);

    for (Eigen::Index s = 0; s < P; s += batch) {
      const Eigen::Index b = std::min(batch, P - s);
      x.resize(d, b);
      for (Eigen::Index j = 0; j < b; ++j) x.col(j) = z.col(order[static_cast<std::size_t>(s + j)]);
      const Matrix inv_wt = inverse_transpose(epoch);
      const Matrix score = score_of(x, true);
      W += rate * (inv_wt + score * x.transpose() / static_cast<double>(b));
      if (!W.allFinite()) throw DivergenceError("weights became non-finite", last_stable, epoch);
    }
    last_stable = W;

    // Update norm of the full-batch rule at the new weights.
    const Matrix full =
        inverse_transpose(epoch) + score_of(z, false) * z.transpose() / static_cast<double>(P);
    const double update = rate * full.norm();
    if (update > previous_update) rate *= cfg.anneal;
    previous_update = update;
    if (update / W.norm() < cfg.tol) {
      out.converged = true;
      break;
    }
  }

  out.W = W;
  out.W_total = W;
  out.sources = W * z;
  out.mixing = W.inverse();
  out.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace despeckle
