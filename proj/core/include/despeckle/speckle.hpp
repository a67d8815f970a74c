#pragma once

#include "despeckle/image.hpp"
#include "despeckle/registration.hpp"

#include <cstdint>
#include <vector>

namespace despeckle {

struct Jitter {
  double max_shift_x = 0.0;  ///< pixels
  double max_shift_y = 0.0;  ///< pixels
  double max_theta = 0.0;    ///< radians
};

struct SpeckleConfig {
  double looks = 4.0;  ///< gamma shape L; speckle is Gamma(L, 1/L), unit mean
  int n_frames = 1;
  Jitter jitter;
  std::uint64_t seed = 0;
};

struct SpeckleStack {
  ImageStack frames;
  std::vector<RigidTransform> truth;  ///< motion of each frame; frame 0 is the reference
};

/// Seed of frame `index`: splitmix64 of seed + (index + 1) * 0x9E3779B97F4A7C15.
std::uint64_t frame_seed(std::uint64_t seed, std::size_t index) noexcept;

/// Speckle field with i.i.d. Gamma(looks, 1/looks) pixels.
Matrix speckle_field(Eigen::Index height, Eigen::Index width, double looks, std::uint64_t seed);

/// frame_i = clamp(warp_rigid(clean, T_i) * S_i). T_0 is the identity so that
/// the first frame defines the reference geometry; later T_i are uniform in the
/// jitter bounds.
SpeckleStack generate_speckle_stack(const Image& clean, const SpeckleConfig& cfg);

/// Affine map between log(v + eps) and [0, 1], fixed by eps alone so every
/// frame of a stack shares one scale.
struct LogScale {
  double eps = 1e-4;
  double lo = 0.0;  ///< log(eps)
  double hi = 0.0;  ///< log(1 + eps)

  static LogScale for_eps(double eps);
};

struct LogImage {
  Image image;
  LogScale scale;
};

LogImage log_compress(const Image& img, double eps = 1e-4);
Image exp_decompress(const Image& img, const LogScale& scale);

}  // namespace despeckle
