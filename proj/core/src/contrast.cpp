#include "contrast_detail.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <limits>

namespace despeckle {

double gaussian_contrast_expectation(const Contrast& contrast) {
  using boost::math::constants::one_div_root_two_pi;
  auto integrand = [&](double u) {
    return detail::contrast_value(contrast, u) * one_div_root_two_pi<double>() *
           std::exp(-0.5 * u * u);
  };
  constexpr double inf = std::numeric_limits<double>::infinity();
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, -inf, inf,
                                                                       15, 1e-14);
}

double negentropy_contrast(const Eigen::Ref<const Vector>& y, const Contrast& contrast) {
  require(y.size() > 0, "negentropy of an empty sample");
  require(y.allFinite(), "negentropy sample contains non-finite values");
  const double mean = y.mean();
  const double var = (y.array() - mean).square().mean();
  require(var >= 0.9 && var <= 1.1,
          "negentropy needs unit-variance input, got variance " + std::to_string(var));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) acc += detail::contrast_value(contrast, y(i));
  const double diff = acc / static_cast<double>(y.size()) - gaussian_contrast_expectation(contrast);
  return diff * diff;
}

}  // namespace despeckle
