#include "despeckle/phantom.hpp"
#include "despeckle/error.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace despeckle {

namespace {

constexpr double kVitreous = 0.05;

struct Layer {
  double top;  ///< fraction of the height
  double value;
};

// Top edges of the layers; each runs to the next one's edge.
constexpr std::array<Layer, 6> kLayers{{
    {0.28, 0.60},
    {0.36, 0.25},
    {0.46, 0.45},
    {0.56, 0.15},
    {0.66, 0.55},
    {0.76, 0.30},
}};

Eigen::Index row_of(double fraction, Eigen::Index height) {
  return static_cast<Eigen::Index>(std::lround(fraction * static_cast<double>(height)));
}

// Downward displacement of the layer edges; zero outside the middle third.
double fovea_dip(Eigen::Index x, Eigen::Index width, Eigen::Index height) {
  const double u = (static_cast<double>(x) + 0.5) / static_cast<double>(width);
  if (u < 1.0 / 3.0 || u > 2.0 / 3.0) return 0.0;
  const double phase = (u - 1.0 / 3.0) * 3.0;
  return 0.08 * static_cast<double>(height) * 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * phase));
}

// Transmission below the first layer; two vessel shadows between the ROI
// columns and the dip.
double vessel_shadow(Eigen::Index x, Eigen::Index width) {
  double t = 1.0;
  for (double centre : {0.275, 0.725}) {
    const double d = (static_cast<double>(x) + 0.5 - centre * static_cast<double>(width)) / 1.5;
    if (std::abs(d) <= 4.0) t *= 1.0 - 0.45 * std::exp(-0.5 * d * d);
  }
  return t;
}

}  // namespace

Image retina_phantom(Eigen::Index width, Eigen::Index height) {
  require(width >= 48 && height >= 48, "phantom needs at least 48x48 pixels");
  Matrix px = Matrix::Constant(height, width, kVitreous);
  for (Eigen::Index x = 0; x < width; ++x) {
    const double dip = fovea_dip(x, width, height);
    const double shadow = vessel_shadow(x, width);
    for (Eigen::Index y = 0; y < height; ++y) {
      const double yy = static_cast<double>(y) - dip;
      for (const Layer& layer : kLayers)
        if (yy >= static_cast<double>(row_of(layer.top, height))) px(y, x) = layer.value;
      if (yy >= static_cast<double>(row_of(kLayers[1].top, height))) px(y, x) *= shadow;
    }
  }
  return Image(std::move(px));
}

RoiSet phantom_rois(Eigen::Index width, Eigen::Index height) {
  require(width >= 48 && height >= 48, "phantom needs at least 48x48 pixels");
  std::vector<Roi> rois;
  const Eigen::Index margin = width / 16;
  const Eigen::Index box_w = width / 6;
  rois.push_back({margin, height / 25, width / 3, row_of(kLayers[0].top, height) - height / 25 -
                                                      height / 12, RoiKind::Background});
  // Layers 0, 2, 4 and 5; left and right of the foveal dip.
  for (std::size_t li : {0u, 2u, 4u, 5u}) {
    const Eigen::Index top = row_of(kLayers[li].top, height);
    const Eigen::Index bottom = li + 1 < kLayers.size() ? row_of(kLayers[li + 1].top, height)
                                                         : height;
    const Eigen::Index inset = std::max<Eigen::Index>(2, (bottom - top) / 5);
    const Eigen::Index h = bottom - top - 2 * inset;
    rois.push_back({margin, top + inset, box_w, h, RoiKind::Feature});
    rois.push_back({width - margin - box_w, top + inset, box_w, h, RoiKind::Feature});
  }
  return RoiSet(std::move(rois));
}

}  // namespace despeckle
