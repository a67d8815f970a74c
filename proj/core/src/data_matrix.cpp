#include "despeckle/core.hpp"
#include "despeckle/error.hpp"

namespace despeckle {

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  require(values_.rows() >= 1, "data matrix needs at least one channel");
  require(values_.cols() >= 1, "data matrix has no samples");
  require(values_.cols() >= values_.rows(),
          "data matrix needs at least as many samples as channels (" +
              std::to_string(values_.cols()) + " < " +
              std::to_string(values_.rows()) + ")");
  require(values_.allFinite(), "data matrix contains non-finite entries");
}

}  // namespace despeckle
