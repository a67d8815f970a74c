#pragma once

#include "despeckle/image.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace despeckle {

enum class RoiKind { Background, Feature };

struct Roi {
  Eigen::Index x = 0, y = 0, w = 0, h = 0;
  RoiKind kind = RoiKind::Feature;

  bool overlaps(const Roi& other) const noexcept;
};

/// One background ROI plus feature ROIs, in file order.
class RoiSet {
 public:
  explicit RoiSet(std::vector<Roi> rois);

  const std::vector<Roi>& rois() const noexcept { return rois_; }
  const Roi& background() const { return rois_[background_]; }
  std::vector<Roi> features() const;
  /// Position of each feature ROI in rois().
  std::vector<std::size_t> feature_ids() const;

 private:
  std::vector<Roi> rois_;
  std::size_t background_ = 0;
};

/// Parses `kind x y w h` lines; `#` starts a comment.
RoiSet parse_rois(std::string_view text);
RoiSet load_rois(const std::filesystem::path& path);
std::string format_rois(const RoiSet& set);

struct RoiStats {
  double mean = 0.0;
  double std = 0.0;  ///< population (1/n) standard deviation

  bool zero_spread() const noexcept { return std == 0.0; }
};

RoiStats roi_stats(const Image& img, const Roi& roi);

/// Per-feature-ROI values and their mean. Undefined per-ROI values are NaN and
/// left out of the mean.
struct MetricSeries {
  std::vector<double> per_roi;
  double mean = 0.0;
  std::vector<std::string> warnings;
};

/// 20 log10(mu_m / sigma_b), in dB.
MetricSeries snr(const Image& img, const RoiSet& rois);
/// (mu_m - mu_b) / sqrt(sigma_m^2 + sigma_b^2)
MetricSeries cnr(const Image& img, const RoiSet& rois);
/// mu_m^2 / sigma_m^2; +infinity for a perfectly flat region.
MetricSeries enl(const Image& img, const RoiSet& rois);

struct MetricsReport {
  std::vector<std::size_t> roi_ids;  ///< index of each feature ROI in the RoiSet
  MetricSeries snr_db;
  MetricSeries cnr;
  MetricSeries enl;
  double elapsed_seconds = 0.0;
};

/// All three metrics. An undefined SNR or CNR is reported as NaN with a warning
/// instead of failing the whole evaluation.
MetricsReport evaluate(const Image& img, const RoiSet& rois);

}  // namespace despeckle
