#include "separation_detail.hpp"

#include <cmath>

namespace despeckle {

std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::InfoMax: return "infomax";
    case Algorithm::FastIca: return "fastica";
    case Algorithm::Jade: return "jade";
    case Algorithm::Sobi: return "sobi";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept {
  for (Algorithm a : {Algorithm::InfoMax, Algorithm::FastIca, Algorithm::Jade, Algorithm::Sobi})
    if (to_string(a) == name) return a;
  return std::nullopt;
}

IcaConfig IcaConfig::defaults(Algorithm algorithm) {
  IcaConfig cfg;
  cfg.algorithm = algorithm;
  switch (algorithm) {
    case Algorithm::InfoMax:
      cfg.max_iters = 512;
      cfg.tol = 1e-6;
      break;
    case Algorithm::FastIca:
      cfg.max_iters = 200;
      cfg.tol = 1e-7;
      break;
    case Algorithm::Jade:
    case Algorithm::Sobi:
      cfg.max_iters = 100;
      cfg.tol = 1e-8;
      break;
  }
  if (algorithm == Algorithm::Sobi)
    for (Eigen::Index p = 1; p <= 10; ++p) cfg.lags.push_back(p);
  return cfg;
}

void IcaConfig::validate() const {
  require(tol > 0.0, "tol must be positive");
  require(max_iters >= 1, "max_iters must be at least 1");
  require(anneal > 0.0 && anneal <= 1.0, "anneal must lie in (0, 1]");
  require(batch_size >= 1, "batch_size must be at least 1");
  require(!learning_rate || *learning_rate > 0.0, "learning_rate must be positive");
  if (contrast.kind == ContrastKind::LogCosh)
    require(contrast.a1 >= 1.0 && contrast.a1 <= 2.0, "logcosh a1 must lie in [1, 2]");
  for (std::size_t i = 0; i < lags.size(); ++i) {
    require(lags[i] >= 1, "lags must be positive");
    require(i == 0 || lags[i] > lags[i - 1], "lags must be strictly increasing");
  }
  require(drop_tol > 0.0 && drop_tol < 1.0, "drop_tol must lie in (0, 1)");
}

UnmixingResult separate(const DataMatrix& X, const IcaConfig& cfg) {
  if (cfg.algorithm == Algorithm::Sobi) return sobi(X, cfg);
  if (cfg.algorithm == Algorithm::Jade) return jade(X, cfg);

  const auto start = detail::Clock::now();
  const Whitened w = whiten(X, cfg.drop_tol);
  UnmixingResult out =
      cfg.algorithm == Algorithm::InfoMax ? infomax(w.data, cfg) : fastica(w.data, cfg);
  out.W_total = out.W * w.whitening.Q;
  out.mixing = w.whitening.Q_pinv * out.mixing;
  out.elapsed_seconds = detail::seconds_since(start);
  return out;
}

}  // namespace despeckle
