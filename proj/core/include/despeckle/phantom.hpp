#pragma once

#include "despeckle/image.hpp"
#include "despeckle/metrics.hpp"

namespace despeckle {

/// Layered retina-like test object: a dark vitreous band, six homogeneous
/// layers with a foveal dip in the middle third and two vessel shadows.
Image retina_phantom(Eigen::Index width = 160, Eigen::Index height = 128);

/// Default nine ROIs for retina_phantom of the same geometry: one background
/// box in the vitreous and eight boxes inside flat parts of four layers.
RoiSet phantom_rois(Eigen::Index width = 160, Eigen::Index height = 128);

}  // namespace despeckle
