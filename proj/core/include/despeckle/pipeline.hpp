#pragma once

#include "despeckle/ica.hpp"
#include "despeckle/image.hpp"
#include "despeckle/metrics.hpp"
#include "despeckle/registration.hpp"
#include "despeckle/speckle.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace despeckle {

/// Estimators and filtering baselines the pipeline can compare.
enum class Method { InfoMax, FastIca, Jade, Sobi, Median, Average };

std::string_view to_string(Method m) noexcept;
std::optional<Method> parse_method(std::string_view name) noexcept;
std::optional<Algorithm> as_algorithm(Method m) noexcept;

/// Row i is frame i flattened row-major, so P = height * width.
DataMatrix build_data_matrix(const ImageStack& aligned);

struct Selection {
  Eigen::Index index = 0;
  double sign = 1.0;
  double scale = 1.0;   ///< least-squares gain onto the reference, after the sign flip
  double offset = 0.0;
  double correlation = 0.0;  ///< |Pearson| with the reference
};

/// Picks the source most correlated with the reference image and fits the
/// sign, gain and offset that map it onto the reference.
Selection select_signal_component(const UnmixingResult& result, const Image& reference,
                                  double min_correlation = 0.2);

/// Inverse of build_data_matrix for one row, with the affine correction
/// scale * sign * component + offset applied and the result clamped to [0, 1].
Image reconstruct_image(const Eigen::Ref<const Eigen::RowVectorXd>& component, double sign,
                        double scale, double offset, Eigen::Index height, Eigen::Index width);

/// Pixelwise temporal median; even stacks average the two central values.
Image median_baseline(const ImageStack& aligned);
Image average_baseline(const ImageStack& aligned);

enum class RegistrationMode { Auto, On, Off };

struct PhantomSpec {
  Eigen::Index width = 160;
  Eigen::Index height = 128;
  double looks = 4.0;
  int frames = 50;
  Jitter jitter;
};

struct PipelineConfig {
  std::optional<std::filesystem::path> input_dir;  ///< unset selects the synthetic phantom
  PhantomSpec phantom;
  bool pre_aligned = false;

  std::vector<Method> methods{Method::InfoMax, Method::FastIca, Method::Jade, Method::Sobi,
                              Method::Median};
  std::map<Algorithm, IcaConfig> ica{
      {Algorithm::InfoMax, IcaConfig::defaults(Algorithm::InfoMax)},
      {Algorithm::FastIca, IcaConfig::defaults(Algorithm::FastIca)},
      {Algorithm::Jade, IcaConfig::defaults(Algorithm::Jade)},
      {Algorithm::Sobi, IcaConfig::defaults(Algorithm::Sobi)}};

  RegistrationMode registration_mode = RegistrationMode::Auto;
  RegistrationConfig registration;

  std::optional<std::filesystem::path> roi_path;  ///< unset uses the phantom ROIs
  std::vector<int> subset_sizes{5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
  bool log_domain = true;
  double log_eps = 1e-4;

  std::optional<std::filesystem::path> output_dir;
  bool write_images = true;

  std::uint64_t seed = 1;
  unsigned jobs = 1;  ///< concurrent cells; forced to 1 while timing
  bool timing = true;

  void validate() const;
};

struct CellReport {
  Method method = Method::Median;
  int n_frames = 0;
  std::optional<MetricsReport> metrics;
  std::optional<Selection> selection;
  bool converged = true;
  int iterations = 0;
  double elapsed_seconds = 0.0;
  std::vector<std::string> warnings;
  std::optional<std::string> error;
  std::optional<Image> image;
};

struct RunReport {
  std::vector<CellReport> cells;  ///< ordered by subset size, then method
  std::optional<MetricsReport> single_frame;  ///< first frame, same domain as the cells
  std::vector<RigidTransform> transforms;
  std::vector<double> registration_quality;
  bool registered = false;
  std::string domain;  ///< "log" or "linear"
  std::vector<std::string> warnings;

  const CellReport* find(Method m, int n_frames) const;
};

/// Loads or synthesizes the stack, registers it, and evaluates every
/// (method, N) cell. A failing cell records its error and the run continues.
/// Writes report.csv, run.log and the reconstructions when output_dir is set.
RunReport run_pipeline(const PipelineConfig& cfg);

/// report.csv contents; `with_elapsed` false blanks the timing column.
std::string format_report_csv(const RunReport& report, bool with_elapsed = true);

struct TimingRow {
  Method method;
  int n_frames;
  double elapsed_seconds;
  int iterations;
  bool converged;
};

/// Estimator-only wall-clock times for every (method, N) cell, run serially.
std::vector<TimingRow> run_timing(const PipelineConfig& cfg);
std::string format_timing_csv(const std::vector<TimingRow>& rows);

}  // namespace despeckle
