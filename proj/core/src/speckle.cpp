#include "despeckle/speckle.hpp"
#include "despeckle/error.hpp"

#include <cmath>
#include <random>

namespace despeckle {

std::uint64_t frame_seed(std::uint64_t seed, std::size_t index) noexcept {
  std::uint64_t z = seed + (static_cast<std::uint64_t>(index) + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Matrix speckle_field(Eigen::Index height, Eigen::Index width, double looks, std::uint64_t seed) {
  require(looks > 0.0, "looks must be positive");
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(looks, 1.0 / looks);
  Matrix s(height, width);
  for (Eigen::Index y = 0; y < height; ++y)
    for (Eigen::Index x = 0; x < width; ++x) s(y, x) = gamma(rng);
  return s;
}

SpeckleStack generate_speckle_stack(const Image& clean, const SpeckleConfig& cfg) {
  require(cfg.looks > 0.0, "looks must be positive");
  require(cfg.n_frames >= 1, "need at least one frame");
  require(cfg.jitter.max_shift_x >= 0.0 && cfg.jitter.max_shift_y >= 0.0 &&
              cfg.jitter.max_theta >= 0.0,
          "jitter bounds must be non-negative");

  SpeckleStack out;
  for (int i = 0; i < cfg.n_frames; ++i) {
    const std::uint64_t s = frame_seed(cfg.seed, static_cast<std::size_t>(i));
    std::mt19937_64 motion(s);
    auto draw = [&](double bound) {
      return bound > 0.0 ? std::uniform_real_distribution<double>(-bound, bound)(motion) : 0.0;
    };
    RigidTransform t;
    if (i > 0) {
      t.dx = draw(cfg.jitter.max_shift_x);
      t.dy = draw(cfg.jitter.max_shift_y);
      t.theta = draw(cfg.jitter.max_theta);
    }
    const Image moved = warp_rigid(clean, t);
    const Matrix field = speckle_field(clean.height(), clean.width(), cfg.looks, ~s);
    out.frames.push_back(Image::clamped(moved.pixels().cwiseProduct(field)));
    out.truth.push_back(t);
  }
  return out;
}

LogScale LogScale::for_eps(double eps) {
  require(eps > 0.0 && std::isfinite(eps), "log eps must be positive");
  return {eps, std::log(eps), std::log1p(eps)};
}

LogImage log_compress(const Image& img, double eps) {
  const LogScale scale = LogScale::for_eps(eps);
  const double span = scale.hi - scale.lo;
  Matrix out = ((img.pixels().array() + eps).log() - scale.lo) / span;
  return {Image::clamped(std::move(out)), scale};
}

Image exp_decompress(const Image& img, const LogScale& scale) {
  require(scale.eps > 0.0 && std::isfinite(scale.eps), "log scale has invalid eps");
  const LogScale expected = LogScale::for_eps(scale.eps);
  require(scale.lo == expected.lo && scale.hi == expected.hi,
          "log scale record does not match its eps");
  const double span = scale.hi - scale.lo;
  Matrix out = (img.pixels().array() * span + scale.lo).exp() - scale.eps;
  return Image::clamped(std::move(out));
}

}  // namespace despeckle
