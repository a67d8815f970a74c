#include "despeckle/metrics.hpp"
#include "despeckle/error.hpp"

#include <cmath>
#include <limits>

namespace despeckle {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void finish_mean(MetricSeries& s) {
  double sum = 0.0;
  int n = 0;
  for (double v : s.per_roi) {
    if (std::isnan(v)) continue;
    sum += v;
    ++n;
  }
  s.mean = n > 0 ? sum / n : kNaN;
}

}  // namespace

bool Roi::overlaps(const Roi& o) const noexcept {
  return x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h;
}

RoiSet::RoiSet(std::vector<Roi> rois) : rois_(std::move(rois)) {
  std::size_t backgrounds = 0;
  for (std::size_t i = 0; i < rois_.size(); ++i) {
    const Roi& r = rois_[i];
    require(r.w >= 2 && r.h >= 2, "ROI " + std::to_string(i) + " is smaller than 2x2");
    require(r.x >= 0 && r.y >= 0, "ROI " + std::to_string(i) + " has a negative origin");
    if (r.kind == RoiKind::Background) {
      ++backgrounds;
      background_ = i;
    }
  }
  require(backgrounds == 1, "ROI set needs exactly one background ROI");
  require(rois_.size() >= 2, "ROI set needs at least one feature ROI");
  for (std::size_t i = 0; i < rois_.size(); ++i)
    if (i != background_)
      require(!rois_[i].overlaps(rois_[background_]),
              "feature ROI " + std::to_string(i) + " overlaps the background ROI");
}

std::vector<Roi> RoiSet::features() const {
  std::vector<Roi> out;
  for (std::size_t i : feature_ids()) out.push_back(rois_[i]);
  return out;
}

std::vector<std::size_t> RoiSet::feature_ids() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rois_.size(); ++i)
    if (i != background_) out.push_back(i);
  return out;
}

RoiStats roi_stats(const Image& img, const Roi& r) {
  require(r.x >= 0 && r.y >= 0 && r.x + r.w <= img.width() && r.y + r.h <= img.height(),
          "ROI lies outside the image");
  const auto block = img.pixels().block(r.y, r.x, r.h, r.w);
  if (block.minCoeff() == block.maxCoeff()) return {block(0, 0), 0.0};
  const double mean = block.mean();
  const double var = (block.array() - mean).square().mean();
  return {mean, std::sqrt(var)};
}

MetricSeries snr(const Image& img, const RoiSet& rois) {
  const RoiStats b = roi_stats(img, rois.background());
  if (b.zero_spread())
    fail(ErrorKind::UndefinedMetric,
         "background ROI has zero standard deviation; check ROI placement");
  MetricSeries s;
  for (std::size_t i : rois.feature_ids()) {
    const RoiStats m = roi_stats(img, rois.rois()[i]);
    if (m.mean <= 0.0) {
      s.per_roi.push_back(kNaN);
      s.warnings.push_back("snr: ROI " + std::to_string(i) + " has non-positive mean; excluded");
      continue;
    }
    s.per_roi.push_back(20.0 * std::log10(m.mean / b.std));
  }
  finish_mean(s);
  return s;
}

MetricSeries cnr(const Image& img, const RoiSet& rois) {
  const RoiStats b = roi_stats(img, rois.background());
  MetricSeries s;
  for (std::size_t i : rois.feature_ids()) {
    const RoiStats m = roi_stats(img, rois.rois()[i]);
    const double denom = std::sqrt(m.std * m.std + b.std * b.std);
    if (!(denom > 0.0))
      fail(ErrorKind::UndefinedMetric,
           "cnr: ROI " + std::to_string(i) + " and background both have zero spread");
    s.per_roi.push_back((m.mean - b.mean) / denom);
  }
  finish_mean(s);
  return s;
}

MetricSeries enl(const Image& img, const RoiSet& rois) {
  MetricSeries s;
  for (std::size_t i : rois.feature_ids()) {
    const RoiStats m = roi_stats(img, rois.rois()[i]);
    if (m.zero_spread()) {
      s.per_roi.push_back(std::numeric_limits<double>::infinity());
      s.warnings.push_back("enl: ROI " + std::to_string(i) + " is perfectly flat");
      continue;
    }
    s.per_roi.push_back(m.mean * m.mean / (m.std * m.std));
  }
  finish_mean(s);
  return s;
}

MetricsReport evaluate(const Image& img, const RoiSet& rois) {
  MetricsReport r;
  r.roi_ids = rois.feature_ids();
  // An undefined metric becomes NaN for every ROI so the others still report.
  const auto guarded = [&](MetricSeries (*metric)(const Image&, const RoiSet&)) {
    try {
      return metric(img, rois);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UndefinedMetric) throw;
      MetricSeries s;
      s.per_roi.assign(r.roi_ids.size(), kNaN);
      s.mean = kNaN;
      s.warnings.push_back(e.what());
      return s;
    }
  };
  r.snr_db = guarded(snr);
  r.cnr = guarded(cnr);
  r.enl = enl(img, rois);
  return r;
}

}  // namespace despeckle
