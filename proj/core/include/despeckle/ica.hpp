#pragma once

#include "despeckle/core.hpp"
#include "despeckle/error.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace despeckle {

enum class Algorithm { InfoMax, FastIca, Jade, Sobi };

std::string_view to_string(Algorithm a) noexcept;
std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept;

enum class ContrastKind { LogCosh, Gauss };

/// FastICA nonlinearity. G1(u) = log(cosh(a1 u)) / a1 with a1 in [1, 2], or
/// G2(u) = -exp(-u^2 / 2).
struct Contrast {
  ContrastKind kind = ContrastKind::LogCosh;
  double a1 = 1.0;

  static Contrast logcosh(double a1 = 1.0) { return {ContrastKind::LogCosh, a1}; }
  static Contrast gauss() { return {ContrastKind::Gauss, 1.0}; }
};

struct IcaConfig {
  Algorithm algorithm = Algorithm::FastIca;
  int max_iters = 200;  ///< epochs (InfoMax), iterations (FastICA), sweeps (JADE, SOBI)
  double tol = 1e-7;    ///< relative update (InfoMax), 1 - |<w, w_old>| (FastICA), radians (JADE, SOBI)

  // InfoMax. An unset learning rate resolves to 0.01 / ln(d + 1).
  std::optional<double> learning_rate;
  double anneal = 0.9;
  int batch_size = 256;
  /// Switch each unit between super- and sub-Gaussian update terms according
  /// to the sign of its estimated kurtosis instead of the plain logistic rule.
  bool extended = false;

  Contrast contrast;                       ///< FastICA
  std::vector<Eigen::Index> lags;          ///< SOBI; strictly increasing, positive
  std::uint64_t seed = 0;
  std::optional<Matrix> initial_unmixing;  ///< InfoMax / FastICA start, d x d
  double drop_tol = kDefaultDropTol;       ///< whitening eigenvalue cutoff

  /// Per-algorithm defaults.
  static IcaConfig defaults(Algorithm algorithm);
  void validate() const;
};

/// Raised when the InfoMax weight matrix becomes singular. Carries the last
/// weight matrix that was still well conditioned.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, Matrix last_stable, int epoch)
      : Error(ErrorKind::Divergence, "divergence: " + what),
        last_stable_(std::move(last_stable)),
        epoch_(epoch) {}

  const Matrix& last_stable() const noexcept { return last_stable_; }
  int epoch() const noexcept { return epoch_; }

 private:
  Matrix last_stable_;
  int epoch_;
};

// Algorithms operating on whitened data (identity covariance, zero mean).
UnmixingResult infomax(const DataMatrix& Z, const IcaConfig& cfg);
UnmixingResult fastica(const DataMatrix& Z, const IcaConfig& cfg);

// Algorithms operating on raw observations; they whiten internally.
UnmixingResult sobi(const DataMatrix& X, const IcaConfig& cfg);
UnmixingResult jade(const DataMatrix& X, const IcaConfig& cfg);

/// Whitens (where needed) and runs the configured algorithm, so W_total and
/// mixing always refer to the original observation space.
UnmixingResult separate(const DataMatrix& X, const IcaConfig& cfg);

/// Expectation of the contrast under a standard Gaussian, by quadrature.
double gaussian_contrast_expectation(const Contrast& contrast);

/// Squared deviation [mean G(y) - E G(v)]^2 for unit-variance y.
double negentropy_contrast(const Eigen::Ref<const Vector>& y, const Contrast& contrast);

/// Contracted fourth-order cumulant matrix C(I) of whitened data.
Matrix quadricov_identity(const DataMatrix& Z);

/// Contracted fourth-order cumulant matrix C(E) of whitened data.
Matrix quadricov_projected(const DataMatrix& Z, const Matrix& E);

/// Amari performance index of G = W_total * A scaled to [0, 1]; 0 exactly when
/// G is a scaled signed permutation.
double amari_index(const Matrix& W_total, const Matrix& A);

}  // namespace despeckle
