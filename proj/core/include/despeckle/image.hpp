#pragma once

#include "despeckle/core.hpp"

#include <vector>

namespace despeckle {

/// Grayscale image with intensities in [0, 1]; rows are image rows (depth for a
/// B-scan), columns are A-scans.
class Image {
 public:
  Image() = default;
  explicit Image(Matrix pixels);

  /// Clamps into [0, 1] instead of rejecting out-of-range values.
  static Image clamped(Matrix pixels);

  const Matrix& pixels() const noexcept { return pixels_; }
  Eigen::Index height() const noexcept { return pixels_.rows(); }
  Eigen::Index width() const noexcept { return pixels_.cols(); }
  Eigen::Index size() const noexcept { return pixels_.size(); }
  double mean() const { return pixels_.mean(); }

  friend bool operator==(const Image& a, const Image& b) {
    return a.pixels_.rows() == b.pixels_.rows() && a.pixels_.cols() == b.pixels_.cols() &&
           a.pixels_ == b.pixels_;
  }

 private:
  Matrix pixels_;
};

/// Frames of the same location in acquisition order.
using ImageStack = std::vector<Image>;

/// Throws unless the stack is non-empty and all frames share one geometry.
void validate_stack(const ImageStack& stack);

}  // namespace despeckle
