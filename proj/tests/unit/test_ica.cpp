#include "despeckle/ica.hpp"
#include "despeckle/jointdiag.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace despeckle;

namespace {

// Largest rotation (radians) separating the rows of G from a scaled signed
// permutation.
double permutation_angle(const Matrix& G) {
  double worst = 0;
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    Eigen::Index j;
    const double big = G.row(i).cwiseAbs().maxCoeff(&j);
    double rest = 0;
    for (Eigen::Index k = 0; k < G.cols(); ++k)
      if (k != j) rest += G(i, k) * G(i, k);
    worst = std::max(worst, std::atan2(std::sqrt(rest), big));
  }
  return worst;
}

// Whitening computed here from the loop covariance, independent of the library.
Matrix oracle_whitener(const Matrix& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(fixtures::loop_covariance(x));
  return es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

// Composite Simpson rule.
template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

double gauss_expectation_oracle(const std::function<double(double)>& g) {
  return simpson([&](double u) { return g(u) * std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi); },
                 -12.0, 12.0, 24000);
}

double logcosh(double u) { return std::abs(u) + std::log1p(std::exp(-2.0 * std::abs(u))) - std::log(2.0); }

Matrix standardize(Matrix s) {
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    s.row(i).array() -= s.row(i).mean();
    s.row(i) /= std::sqrt(s.row(i).squaredNorm() / static_cast<double>(s.cols()));
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------- config

TEST(IcaConfig, DefaultsValidate) {
  for (Algorithm a : {Algorithm::InfoMax, Algorithm::FastIca, Algorithm::Jade, Algorithm::Sobi}) {
    const IcaConfig c = IcaConfig::defaults(a);
    EXPECT_EQ(c.algorithm, a);
    EXPECT_NO_THROW(c.validate());
  }
  const IcaConfig im = IcaConfig::defaults(Algorithm::InfoMax);
  EXPECT_EQ(im.max_iters, 512);
  EXPECT_EQ(im.tol, 1e-6);
  EXPECT_EQ(im.anneal, 0.9);
  EXPECT_EQ(im.batch_size, 256);
  const IcaConfig so = IcaConfig::defaults(Algorithm::Sobi);
  EXPECT_EQ(so.lags.size(), 10u);
  EXPECT_EQ(so.lags.front(), 1);
  EXPECT_EQ(so.lags.back(), 10);
}

TEST(IcaConfig, RejectsBadValues) {
  IcaConfig c = IcaConfig::defaults(Algorithm::Sobi);
  c.lags = {3, 2};
  EXPECT_THROW(c.validate(), Error);
  c.lags = {0, 1};
  EXPECT_THROW(c.validate(), Error);
  c = IcaConfig::defaults(Algorithm::FastIca);
  c.tol = 0;
  EXPECT_THROW(c.validate(), Error);
  c = IcaConfig::defaults(Algorithm::FastIca);
  c.max_iters = 0;
  EXPECT_THROW(c.validate(), Error);
  c = IcaConfig::defaults(Algorithm::FastIca);
  c.contrast = Contrast::logcosh(2.5);
  EXPECT_THROW(c.validate(), Error);
  c = IcaConfig::defaults(Algorithm::InfoMax);
  c.anneal = 0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(IcaConfig, AlgorithmNames) {
  for (Algorithm a : {Algorithm::InfoMax, Algorithm::FastIca, Algorithm::Jade, Algorithm::Sobi})
    EXPECT_EQ(parse_algorithm(to_string(a)), a);
  EXPECT_FALSE(parse_algorithm("pca"));
}

TEST(Separate, LagsMustBeShorterThanData) {
  IcaConfig c = IcaConfig::defaults(Algorithm::Sobi);
  c.lags = {1, 50};
  EXPECT_THROW(separate(DataMatrix(fixtures::gaussian_sources(2, 40, 1)), c), Error);
}

// ---------------------------------------------------------------- amari

TEST(Amari, PerfectSeparation) {
  const Matrix A = fixtures::random_mixing(4, 2);
  EXPECT_LT(amari_index(A.inverse(), A), 1e-12);
}

TEST(Amari, ScaleSignPermutationInvariance) {
  const Matrix A = fixtures::random_mixing(2, 3);
  Matrix P(2, 2);
  P << 0, 1, 1, 0;
  const Matrix W = Eigen::Vector2d(2, -3).asDiagonal() * P * A.inverse();
  EXPECT_LT(amari_index(W, A), 1e-12);
}

TEST(Amari, WorstCase) {
  EXPECT_NEAR(amari_index(Matrix::Ones(2, 2), Matrix::Identity(2, 2)), 1.0, 1e-12);
}

TEST(Amari, HandFormula) {
  Matrix G(2, 2);
  G << 1, 0.5, 0.25, 1;
  // rows: (1.5/1 - 1) + (1.25/1 - 1); columns: (1.25/1 - 1) + (1.5/1 - 1); / (2 d (d - 1))
  EXPECT_NEAR(amari_index(G, Matrix::Identity(2, 2)), (0.5 + 0.25 + 0.25 + 0.5) / 4.0, 1e-12);
}

TEST(Amari, DimensionMismatch) {
  EXPECT_THROW(amari_index(Matrix::Identity(2, 3), Matrix::Identity(2, 2)), Error);
}

// ---------------------------------------------------------------- infomax

TEST(InfoMax, ExtendedRuleFromIdentityOnIndependentUniforms) {
  const Matrix z = standardize(fixtures::uniform_sources(3, 20000, 4));
  IcaConfig c = IcaConfig::defaults(Algorithm::InfoMax);
  c.extended = true;
  c.initial_unmixing = Matrix::Identity(3, 3);
  const UnmixingResult r = infomax(DataMatrix(z), c);
  EXPECT_LT(amari_index(r.W, Matrix::Identity(3, 3)), 0.05);
}

TEST(InfoMax, LogisticRuleFromIdentityOnIndependentLaplacians) {
  const Matrix z = standardize(fixtures::laplace_sources(3, 20000, 5));
  IcaConfig c = IcaConfig::defaults(Algorithm::InfoMax);
  c.initial_unmixing = Matrix::Identity(3, 3);
  const UnmixingResult r = infomax(DataMatrix(z), c);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(amari_index(r.W, Matrix::Identity(3, 3)), 0.05);
}

TEST(InfoMax, RotatedUniformsWithExtendedRule) {
  const Matrix s = fixtures::uniform_sources(2, 20000, 6);
  const Matrix R = fixtures::rotation2(std::numbers::pi / 4);
  IcaConfig c = IcaConfig::defaults(Algorithm::InfoMax);
  c.extended = true;
  const UnmixingResult r = separate(DataMatrix(R * s), c);
  for (double corr : fixtures::matched_correlations(s, r.sources)) EXPECT_GT(corr, 0.99);
}

TEST(InfoMax, LogisticRuleDoesNotSeparateSubGaussianSources) {
  // The logistic score only fits super-Gaussian sources.
  const Matrix s = fixtures::uniform_sources(2, 20000, 6);
  const Matrix R = fixtures::rotation2(std::numbers::pi / 4);
  const UnmixingResult r = separate(DataMatrix(R * s), IcaConfig::defaults(Algorithm::InfoMax));
  EXPECT_GT(amari_index(r.W_total, R), 0.5);
}

TEST(InfoMax, RotatedLaplaciansWithLogisticRule) {
  const Matrix s = fixtures::laplace_sources(2, 20000, 7);
  const Matrix R = fixtures::rotation2(std::numbers::pi / 4);
  const UnmixingResult r = separate(DataMatrix(R * s), IcaConfig::defaults(Algorithm::InfoMax));
  for (double corr : fixtures::matched_correlations(s, r.sources)) EXPECT_GT(corr, 0.99);
}

TEST(InfoMax, SingleChannel) {
  const Matrix z = standardize(fixtures::laplace_sources(1, 1000, 8));
  const UnmixingResult r = infomax(DataMatrix(z), IcaConfig::defaults(Algorithm::InfoMax));
  ASSERT_EQ(r.W.rows(), 1);
  EXPECT_EQ(std::abs(r.W(0, 0)), 1.0);
  EXPECT_EQ(r.sources.cwiseAbs(), z.cwiseAbs());
}

TEST(InfoMax, DivergenceReportsLastStableWeights) {
  const Matrix z = standardize(fixtures::laplace_sources(2, 2000, 9));
  IcaConfig c = IcaConfig::defaults(Algorithm::InfoMax);
  Matrix w0(2, 2);
  w0 << 1, 1, 1, 1 + 1e-14;
  c.initial_unmixing = w0;
  try {
    infomax(DataMatrix(z), c);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Divergence);
    EXPECT_EQ(e.last_stable(), w0);
    EXPECT_EQ(e.epoch(), 1);
  }
}

TEST(InfoMax, Deterministic) {
  const Matrix x = fixtures::random_mixing(3, 10) * fixtures::laplace_sources(3, 3000, 11);
  IcaConfig c = IcaConfig::defaults(Algorithm::InfoMax);
  c.seed = 77;
  EXPECT_EQ(separate(DataMatrix(x), c).W_total, separate(DataMatrix(x), c).W_total);
}

// ---------------------------------------------------------------- fastica

TEST(FastIca, LaplaciansUnderOrthogonalMixing) {
  const Matrix s = standardize(fixtures::laplace_sources(4, 20000, 12));
  const Matrix A = fixtures::random_orthogonal(4, 13);
  IcaConfig c = IcaConfig::defaults(Algorithm::FastIca);
  c.seed = 5;
  const UnmixingResult r = separate(DataMatrix(A * s), c);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(amari_index(r.W_total, A), 0.05);
}

TEST(FastIca, SignedPermutationIsAFixedPoint) {
  // Every combination of a 12-point symmetric marginal: the sample is exactly
  // independent, zero mean and white, so signed permutations are fixed points.
  std::vector<double> levels;
  for (int k = 0; k < 12; ++k) {
    const double p = (k + 0.5) / 12.0;
    levels.push_back(p < 0.5 ? std::log(2.0 * p) : -std::log(2.0 * (1.0 - p)));
  }
  double var = 0;
  for (double v : levels) var += v * v / 12.0;
  Matrix z(4, 12 * 12 * 12 * 12);
  for (Eigen::Index t = 0; t < z.cols(); ++t) {
    Eigen::Index rest = t;
    for (Eigen::Index i = 0; i < 4; ++i, rest /= 12) z(i, t) = levels[static_cast<std::size_t>(rest % 12)] / std::sqrt(var);
  }
  Matrix P = Matrix::Zero(4, 4);
  P(0, 2) = 1;
  P(1, 0) = -1;
  P(2, 3) = 1;
  P(3, 1) = -1;
  IcaConfig c = IcaConfig::defaults(Algorithm::FastIca);
  c.initial_unmixing = Matrix::Identity(4, 4);
  const UnmixingResult r = fastica(DataMatrix(P * z), c);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 3);
  EXPECT_LT(fixtures::signed_permutation_distance(r.W * P), 1e-8);
}

TEST(FastIca, GaussContrast) {
  const Matrix s = fixtures::uniform_sources(3, 20000, 15);
  const Matrix A = fixtures::random_mixing(3, 16);
  IcaConfig c = IcaConfig::defaults(Algorithm::FastIca);
  c.contrast = Contrast::gauss();
  EXPECT_LT(amari_index(separate(DataMatrix(A * s), c).W_total, A), 0.05);
}

TEST(FastIca, GaussianSourcesDoNotRaise) {
  const Matrix s = fixtures::gaussian_sources(3, 5000, 17);
  IcaConfig c = IcaConfig::defaults(Algorithm::FastIca);
  c.max_iters = 50;
  UnmixingResult r;
  EXPECT_NO_THROW(r = separate(DataMatrix(fixtures::random_mixing(3, 18) * s), c));
  if (!r.converged) EXPECT_FALSE(r.warnings.empty());
}

TEST(FastIca, UnmixingIsOrthogonalOnWhiteData) {
  const Matrix x = fixtures::random_mixing(3, 19) * fixtures::laplace_sources(3, 5000, 20);
  const UnmixingResult r = separate(DataMatrix(x), IcaConfig::defaults(Algorithm::FastIca));
  EXPECT_LT((r.W * r.W.transpose() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-8);
  // mixing * W_total is the identity on the retained subspace.
  EXPECT_LT((r.W_total * r.mixing - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-8);
}

// ---------------------------------------------------------------- contrast

TEST(Contrast, GaussianExpectationMatchesSimpson) {
  for (double a1 : {1.0, 1.5, 2.0}) {
    const double oracle = gauss_expectation_oracle([a1](double u) { return logcosh(a1 * u) / a1; });
    EXPECT_NEAR(gaussian_contrast_expectation(Contrast::logcosh(a1)), oracle, 1e-9);
  }
  EXPECT_NEAR(gaussian_contrast_expectation(Contrast::gauss()), -1.0 / std::sqrt(2.0), 1e-12);
}

TEST(Negentropy, GaussianIsNearZero) {
  const Vector y = fixtures::gaussian_sources(1, 100000, 21).row(0).transpose();
  EXPECT_LT(negentropy_contrast(y, Contrast::logcosh()), 1e-3);
  EXPECT_LT(negentropy_contrast(y, Contrast::gauss()), 1e-3);
}

TEST(Negentropy, UniformMatchesLargeSampleOracle) {
  const Vector y = fixtures::uniform_sources(1, 100000, 22).row(0).transpose();
  // Monte-Carlo oracle with 10^7 draws and a Simpson Gaussian reference.
  std::mt19937_64 rng(999);
  std::uniform_real_distribution<double> u(-std::sqrt(3.0), std::sqrt(3.0));
  double sum = 0;
  const int n = 10000000;
  for (int i = 0; i < n; ++i) sum += logcosh(u(rng));
  const double diff = sum / n - gauss_expectation_oracle(logcosh);
  const double oracle = diff * diff;
  EXPECT_NEAR(negentropy_contrast(y, Contrast::logcosh()), oracle, 0.1 * oracle);
}

TEST(Negentropy, LaplacianExceedsGaussian) {
  const Vector lap = fixtures::laplace_sources(1, 100000, 23).row(0).transpose();
  const Vector gau = fixtures::gaussian_sources(1, 100000, 24).row(0).transpose();
  for (const Contrast& c : {Contrast::logcosh(), Contrast::gauss()}) {
    const double v = negentropy_contrast(lap, c);
    EXPECT_GT(v, 0.0);
    EXPECT_GT(v, negentropy_contrast(gau, c));
  }
}

TEST(Negentropy, RejectsNonUnitVariance) {
  const Vector y = 2.0 * fixtures::gaussian_sources(1, 1000, 25).row(0).transpose();
  EXPECT_THROW(negentropy_contrast(y, Contrast::logcosh()), Error);
}

// ---------------------------------------------------------------- sobi

TEST(Sobi, TwoSinusoids) {
  Matrix s(2, 10000);
  s.row(0) = fixtures::sinusoid(20.0, 10000);
  s.row(1) = fixtures::sinusoid(7.0, 10000);
  Matrix A(2, 2);
  A << 1, 0.5, 0.3, 1;
  const UnmixingResult r = separate(DataMatrix(A * s), IcaConfig::defaults(Algorithm::Sobi));
  for (double corr : fixtures::matched_correlations(s, r.sources)) EXPECT_GT(corr, 0.95);
}

TEST(Sobi, TwoAutoregressiveSources) {
  Matrix s(2, 20000);
  s.row(0) = fixtures::ar1(0.9, 20000, 26);
  s.row(1) = fixtures::ar1(-0.5, 20000, 27);
  const Matrix A = fixtures::random_mixing(2, 28);
  const UnmixingResult r = separate(DataMatrix(A * s), IcaConfig::defaults(Algorithm::Sobi));
  EXPECT_TRUE(r.converged);
  EXPECT_LT(amari_index(r.W_total, A), 0.1);
}

TEST(Sobi, WhiteRowsAreNotSeparable) {
  const Matrix s = fixtures::gaussian_sources(2, 5000, 29);
  const UnmixingResult r = separate(DataMatrix(s), IcaConfig::defaults(Algorithm::Sobi));
  EXPECT_FALSE(r.converged);
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_NE(r.warnings.front().find("sobi"), std::string::npos);
}

// ---------------------------------------------------------------- cumulants

TEST(Quadricov, GaussianCumulantsVanish) {
  const Matrix z = fixtures::gaussian_sources(3, 200000, 30);
  EXPECT_LT(quadricov_identity(DataMatrix(z)).cwiseAbs().maxCoeff(), 0.05);
  Matrix E = fixtures::random_orthogonal(3, 31);
  E = (E + E.transpose()).eval();
  EXPECT_LT(quadricov_projected(DataMatrix(z), E).cwiseAbs().maxCoeff(), 0.05);
}

TEST(Quadricov, RademacherKurtosis) {
  const Matrix z = fixtures::rademacher_sources(1, 100000, 32);
  EXPECT_NEAR(quadricov_identity(DataMatrix(z))(0, 0), -2.0, 0.05);
}

TEST(Quadricov, LaplaceKurtosis) {
  const Matrix z = standardize(fixtures::laplace_sources(1, 4000000, 33));
  EXPECT_NEAR(quadricov_identity(DataMatrix(z))(0, 0), 3.0, 0.1);
}

TEST(Quadricov, ProjectedWithIdentityReproducesIdentityForm) {
  const Matrix z = whiten(DataMatrix(fixtures::random_mixing(3, 34) * fixtures::uniform_sources(3, 5000, 35))).data.values();
  const DataMatrix dz(z);
  EXPECT_LT((quadricov_projected(dz, Matrix::Identity(3, 3)) - quadricov_identity(dz)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Quadricov, PermutedLaplaciansGiveDiagonalSlices) {
  const Matrix s = standardize(fixtures::laplace_sources(3, 200000, 36));
  Matrix P = Matrix::Zero(3, 3);
  P(0, 1) = 1;
  P(1, 2) = -1;
  P(2, 0) = 1;
  const Matrix E = Vector::Unit(3, 0) * Vector::Unit(3, 0).transpose();
  const Matrix C = quadricov_projected(DataMatrix(P * s), E);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j)
      if (i != j) EXPECT_LT(std::abs(C(i, j)), 0.05);
}

TEST(Quadricov, MatchesBruteForceTensor) {
  const Matrix z = whiten(DataMatrix(fixtures::random_mixing(2, 37) * fixtures::laplace_sources(2, 3000, 38))).data.values();
  const double P = static_cast<double>(z.cols());
  auto m2 = [&](int i, int j) { return (z.row(i).array() * z.row(j).array()).sum() / P; };
  auto kappa = [&](int i, int j, int k, int l) {
    const double m4 = (z.row(i).array() * z.row(j).array() * z.row(k).array() * z.row(l).array()).sum() / P;
    return m4 - m2(i, j) * m2(k, l) - m2(i, k) * m2(j, l) - m2(i, l) * m2(j, k);
  };
  Matrix E(2, 2);
  E << 0.3, -0.7, -0.7, 1.1;
  Matrix expect = Matrix::Zero(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) expect(i, j) += kappa(i, j, k, l) * E(k, l);
  EXPECT_LT((quadricov_projected(DataMatrix(z), E) - expect).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Quadricov, DimensionMismatch) {
  EXPECT_THROW(quadricov_projected(DataMatrix(fixtures::gaussian_sources(2, 100, 39)), Matrix::Identity(3, 3)), Error);
}

// ---------------------------------------------------------------- jade

TEST(Jade, ThreeUniforms) {
  const Matrix s = fixtures::uniform_sources(3, 50000, 40);
  const Matrix A = fixtures::random_mixing(3, 41);
  const UnmixingResult r = separate(DataMatrix(A * s), IcaConfig::defaults(Algorithm::Jade));
  EXPECT_TRUE(r.converged);
  EXPECT_LT(amari_index(r.W_total, A), 0.05);
}

TEST(Jade, AgreesWithExhaustiveAngleScan) {
  Matrix s(2, 50000);
  s.row(0) = fixtures::uniform_sources(1, 50000, 42);
  s.row(1) = fixtures::laplace_sources(1, 50000, 43);
  const Matrix x = fixtures::random_mixing(2, 44) * s;

  const Matrix Q = oracle_whitener(x);
  const Matrix z = Q * (x.colwise() - x.rowwise().mean());
  const double P = static_cast<double>(z.cols());
  auto moment = [&](std::initializer_list<int> idx) {
    Eigen::ArrayXd prod = Eigen::ArrayXd::Ones(z.cols());
    for (int i : idx) prod *= z.row(i).transpose().array();
    return prod.sum() / P;
  };
  std::vector<Matrix> slices;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      Matrix m(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          m(i, j) = moment({i, j, k, l}) - moment({i, j}) * moment({k, l}) -
                    moment({i, k}) * moment({j, l}) - moment({i, l}) * moment({j, k});
      slices.push_back(0.5 * (m + m.transpose()));
    }
  const MatrixSet set(slices);
  double best_theta = 0, best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 90000; ++i) {
    const double th = -std::numbers::pi / 4 + i * (std::numbers::pi / 2) / 90000;
    const double e = offdiag_energy(set, fixtures::rotation2(th));
    if (e < best) {
      best = e;
      best_theta = th;
    }
  }
  const Matrix W_oracle = fixtures::rotation2(best_theta).transpose() * Q;
  const UnmixingResult r = separate(DataMatrix(x), IcaConfig::defaults(Algorithm::Jade));
  const Matrix G = r.W_total * W_oracle.inverse();
  EXPECT_LT(permutation_angle(G), std::numbers::pi / 180.0);
}

TEST(Jade, IndependentWhiteSourcesGiveSignedPermutation) {
  const Matrix z = standardize(fixtures::uniform_sources(3, 50000, 45));
  const UnmixingResult r = separate(DataMatrix(z), IcaConfig::defaults(Algorithm::Jade));
  EXPECT_LT(fixtures::signed_permutation_distance(r.W_total), 0.05);
}

TEST(Jade, GaussianDataWarns) {
  const UnmixingResult r = separate(DataMatrix(fixtures::gaussian_sources(3, 5000, 46)), IcaConfig::defaults(Algorithm::Jade));
  EXPECT_FALSE(r.warnings.empty());
}

// ---------------------------------------------------------------- separate

TEST(Separate, ReducedRankOutputsRetainedDimension) {
  const Matrix s = fixtures::laplace_sources(2, 5000, 47);
  Matrix A(3, 2);
  A << 1, 0.2, 0.3, 1, 1.3, 1.2;
  for (Algorithm a : {Algorithm::InfoMax, Algorithm::FastIca, Algorithm::Jade, Algorithm::Sobi}) {
    const UnmixingResult r = separate(DataMatrix(A * s), IcaConfig::defaults(a));
    EXPECT_EQ(r.W.rows(), 2) << to_string(a);
    EXPECT_EQ(r.W_total.cols(), 3);
    EXPECT_EQ(r.mixing.rows(), 3);
    EXPECT_EQ(r.sources.rows(), 2);
    EXPECT_EQ(r.sources.cols(), 5000);
  }
}

TEST(Separate, SourcesAreWTotalTimesCenteredData) {
  const Matrix x = (fixtures::random_mixing(3, 48) * fixtures::laplace_sources(3, 4000, 49)).array() + 2.0;
  for (Algorithm a : {Algorithm::InfoMax, Algorithm::FastIca, Algorithm::Jade, Algorithm::Sobi}) {
    const UnmixingResult r = separate(DataMatrix(x), IcaConfig::defaults(a));
    const Matrix xc = x.colwise() - x.rowwise().mean();
    EXPECT_LT((r.W_total * xc - r.sources).cwiseAbs().maxCoeff(), 1e-8) << to_string(a);
  }
}
