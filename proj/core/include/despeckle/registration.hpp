#pragma once

#include "despeckle/image.hpp"

#include <string>
#include <vector>

namespace despeckle {

/// Rotation by theta about the image center followed by a shift (dx, dy).
/// A point p maps to R(theta) (p - c) + c + (dx, dy); x runs along columns.
struct RigidTransform {
  double dx = 0.0;
  double dy = 0.0;
  double theta = 0.0;  ///< radians, kept in (-pi, pi]

  static RigidTransform identity() { return {}; }
  RigidTransform inverse() const;
  /// Transform applying *this first and then `after`.
  RigidTransform then(const RigidTransform& after) const;
};

double degrees(double radians) noexcept;
double radians(double degrees) noexcept;

struct Translation {
  double dx = 0.0;
  double dy = 0.0;
};

/// Phase correlation with parabolic sub-pixel refinement. The result is the
/// shift that carries ref onto mov.
Translation estimate_translation(const Image& ref, const Image& mov);

struct RigidEstimate {
  RigidTransform transform;  ///< carries ref onto mov
  double ncc = 0.0;          ///< normalized cross-correlation on the overlap
  double overlap = 0.0;      ///< fraction of ref pixels covered by mov
};

/// Normalized cross-correlation between ref and mov under `t` (mov ~ warp(ref, t)),
/// restricted to the valid overlap.
RigidEstimate score_alignment(const Image& ref, const Image& mov, const RigidTransform& t);

/// Grid search over theta in [-theta_range, theta_range] with translation by
/// phase correlation at each angle, then golden-section refinement of theta.
RigidEstimate estimate_rigid(const Image& ref, const Image& mov, double theta_range,
                             double theta_step);

/// Inverse-mapped bilinear warp about the image center; samples outside the
/// source take the source mean.
Image warp_rigid(const Image& img, const RigidTransform& t);

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Output pixels of warp_rigid(img, t) that are sampled from inside the source
/// rather than mean-filled.
Mask warp_coverage(Eigen::Index height, Eigen::Index width, const RigidTransform& t);

struct RegistrationConfig {
  double theta_range = 5.0 * 3.14159265358979323846 / 180.0;
  double theta_step = 0.5 * 3.14159265358979323846 / 180.0;
  int levels = 3;
  double min_quality = 0.3;
  double smoothing = 1.5;  ///< Gaussian sigma in pixels applied before matching; 0 disables
  int template_passes = 1;  ///< re-estimation rounds against the mean aligned frame
  double border_margin = 0.1;  ///< fraction of each side left out of the NCC score
  unsigned threads = 0;  ///< 0 selects the hardware concurrency
};

struct StackRegistration {
  ImageStack aligned;
  std::vector<RigidTransform> transforms;  ///< per frame, identity for the reference
  std::vector<double> quality;             ///< NCC per frame, 1 for the reference
  std::vector<bool> flagged;
  std::vector<Mask> coverage;  ///< per aligned frame, see warp_coverage
  std::vector<std::string> warnings;
};

/// Registers every frame to the first one with a coarse-to-fine pyramid.
StackRegistration register_stack(const ImageStack& stack, const RegistrationConfig& cfg = {});

}  // namespace despeckle
