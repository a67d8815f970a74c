#include "despeckle/image.hpp"
#include "despeckle/error.hpp"

namespace despeckle {

Image::Image(Matrix pixels) : pixels_(std::move(pixels)) {
  require(pixels_.rows() >= 1 && pixels_.cols() >= 1, "image is empty");
  require(pixels_.allFinite(), "image contains non-finite pixels");
  require(pixels_.minCoeff() >= 0.0 && pixels_.maxCoeff() <= 1.0,
          "image intensities must lie in [0, 1]");
}

Image Image::clamped(Matrix pixels) {
  require(pixels.allFinite(), "image contains non-finite pixels");
  return Image(pixels.cwiseMax(0.0).cwiseMin(1.0));
}

void validate_stack(const ImageStack& stack) {
  require(!stack.empty(), "image stack is empty");
  for (const Image& f : stack)
    require(f.height() == stack.front().height() && f.width() == stack.front().width(),
            "image stack frames differ in size");
}

}  // namespace despeckle
