#include "despeckle/pipeline.hpp"
#include "despeckle/error.hpp"
#include "despeckle/pgm.hpp"
#include "despeckle/phantom.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace despeckle {

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::InfoMax: return "infomax";
    case Method::FastIca: return "fastica";
    case Method::Jade: return "jade";
    case Method::Sobi: return "sobi";
    case Method::Median: return "median";
    case Method::Average: return "average";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
  for (Method m : {Method::InfoMax, Method::FastIca, Method::Jade, Method::Sobi, Method::Median,
                   Method::Average})
    if (to_string(m) == name) return m;
  return std::nullopt;
}

std::optional<Algorithm> as_algorithm(Method m) noexcept {
  switch (m) {
    case Method::InfoMax: return Algorithm::InfoMax;
    case Method::FastIca: return Algorithm::FastIca;
    case Method::Jade: return Algorithm::Jade;
    case Method::Sobi: return Algorithm::Sobi;
    default: return std::nullopt;
  }
}

DataMatrix build_data_matrix(const ImageStack& aligned) {
  validate_stack(aligned);
  const Eigen::Index h = aligned.front().height(), w = aligned.front().width();
  Matrix X(static_cast<Eigen::Index>(aligned.size()), h * w);
  for (std::size_t i = 0; i < aligned.size(); ++i) {
    const Matrix& px = aligned[i].pixels();
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index y = 0; y < h; ++y)
      X.row(row).segment(y * w, w) = px.row(y);
  }
  return DataMatrix(std::move(X));
}

Selection select_signal_component(const UnmixingResult& result, const Image& reference,
                                  double min_correlation) {
  const Matrix& S = result.sources;
  require(S.rows() >= 1, "no sources to select from");
  require(S.cols() == reference.size(), "source length does not match the reference image");

  const Eigen::Index h = reference.height(), w = reference.width();
  Eigen::RowVectorXd ref(h * w);
  for (Eigen::Index y = 0; y < h; ++y) ref.segment(y * w, w) = reference.pixels().row(y);
  const Eigen::RowVectorXd rc = ref.array() - ref.mean();
  const double ref_norm = rc.norm();
  require(ref_norm > 0.0, "reference image is constant");

  std::vector<double> corr(static_cast<std::size_t>(S.rows()), 0.0);
  for (Eigen::Index k = 0; k < S.rows(); ++k) {
    const Eigen::RowVectorXd sc = S.row(k).array() - S.row(k).mean();
    const double sn = sc.norm();
    corr[static_cast<std::size_t>(k)] = sn > 0.0 ? sc.dot(rc) / (sn * ref_norm) : 0.0;
  }
  std::vector<Eigen::Index> order(corr.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<Eigen::Index>(k);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(corr[static_cast<std::size_t>(a)]) > std::abs(corr[static_cast<std::size_t>(b)]);
  });

  const Eigen::Index best = order.front();
  const double r = corr[static_cast<std::size_t>(best)];
  if (std::abs(r) < min_correlation) {
    std::ostringstream msg;
    msg << "no source correlates with the reference above " << min_correlation << "; top:";
    for (std::size_t i = 0; i < std::min<std::size_t>(3, order.size()); ++i)
      msg << " #" << order[i] << " (" << corr[static_cast<std::size_t>(order[i])] << ")";
    fail(ErrorKind::SelectionAmbiguous, msg.str());
  }

  Selection sel;
  sel.index = best;
  sel.sign = r < 0.0 ? -1.0 : 1.0;
  sel.correlation = std::abs(r);
  const Eigen::RowVectorXd s = sel.sign * S.row(best);
  const double s_mean = s.mean();
  const Eigen::RowVectorXd sc = s.array() - s_mean;
  sel.scale = sc.dot(rc) / sc.squaredNorm();
  sel.offset = ref.mean() - sel.scale * s_mean;
  return sel;
}

Image reconstruct_image(const Eigen::Ref<const Eigen::RowVectorXd>& component, double sign,
                        double scale, double offset, Eigen::Index height, Eigen::Index width) {
  require(height >= 1 && width >= 1, "image geometry must be positive");
  require(component.size() == height * width, "component length does not match the geometry");
  Matrix px(height, width);
  for (Eigen::Index y = 0; y < height; ++y)
    px.row(y) = (scale * sign * component.segment(y * width, width)).array() + offset;
  return Image::clamped(std::move(px));
}

Image median_baseline(const ImageStack& aligned) {
  validate_stack(aligned);
  const std::size_t n = aligned.size();
  const Eigen::Index h = aligned.front().height(), w = aligned.front().width();
  Matrix px(h, w);
  std::vector<double> values(n);
  const std::size_t mid = n / 2;
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      for (std::size_t i = 0; i < n; ++i) values[i] = aligned[i].pixels()(y, x);
      std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                       values.end());
      double m = values[mid];
      if (n % 2 == 0) {
        const double lower =
            *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
        m = 0.5 * (lower + m);
      }
      px(y, x) = m;
    }
  }
  return Image(std::move(px));
}

Image average_baseline(const ImageStack& aligned) {
  validate_stack(aligned);
  Matrix sum = Matrix::Zero(aligned.front().height(), aligned.front().width());
  for (const Image& f : aligned) sum += f.pixels();
  return Image::clamped(sum / static_cast<double>(aligned.size()));
}

void PipelineConfig::validate() const {
  require(!methods.empty(), "at least one algorithm must be selected");
  require(!subset_sizes.empty(), "at least one subset size is required");
  for (int n : subset_sizes) require(n >= 1, "subset sizes must be positive");
  if (!input_dir) {
    require(phantom.frames >= 1, "phantom needs at least one frame");
    for (int n : subset_sizes)
      require(n <= phantom.frames,
              "subset size " + std::to_string(n) + " exceeds the " +
                  std::to_string(phantom.frames) + " available frames");
  }
  require(log_eps > 0.0, "log eps must be positive");
  for (Method m : methods)
    if (auto a = as_algorithm(m)) {
      require(ica.contains(*a), "missing configuration for " + std::string(to_string(m)));
      ica.at(*a).validate();
    }
}

const CellReport* RunReport::find(Method m, int n_frames) const {
  for (const CellReport& c : cells)
    if (c.method == m && c.n_frames == n_frames) return &c;
  return nullptr;
}

namespace {

struct Prepared {
  ImageStack frames;  ///< registered, in the processing domain
  std::vector<Mask> coverage;  ///< per frame after registration; empty when not registered
  RoiSet rois;
  RunReport report;
};

Prepared prepare(const PipelineConfig& cfg) {
  cfg.validate();
  RunReport report;
  ImageStack frames;
  bool synthetic_still = false;
  if (cfg.input_dir) {
    frames = read_stack(*cfg.input_dir);
  } else {
    const Image clean = retina_phantom(cfg.phantom.width, cfg.phantom.height);
    SpeckleConfig sc{cfg.phantom.looks, cfg.phantom.frames, cfg.phantom.jitter, cfg.seed};
    frames = generate_speckle_stack(clean, sc).frames;
    const Jitter& j = cfg.phantom.jitter;
    synthetic_still = j.max_shift_x == 0.0 && j.max_shift_y == 0.0 && j.max_theta == 0.0;
  }
  for (int n : cfg.subset_sizes)
    require(static_cast<std::size_t>(n) <= frames.size(),
            "subset size " + std::to_string(n) + " exceeds the " + std::to_string(frames.size()) +
                " available frames");

  RoiSet rois = cfg.roi_path ? load_rois(*cfg.roi_path)
                             : phantom_rois(frames.front().width(), frames.front().height());

  std::vector<Mask> coverage;
  const bool do_register =
      cfg.registration_mode == RegistrationMode::On ||
      (cfg.registration_mode == RegistrationMode::Auto && !cfg.pre_aligned && !synthetic_still);
  if (do_register && frames.size() >= 2) {
    StackRegistration reg = register_stack(frames, cfg.registration);
    frames = std::move(reg.aligned);
    coverage = std::move(reg.coverage);
    report.transforms = std::move(reg.transforms);
    report.registration_quality = std::move(reg.quality);
    report.registered = true;
    for (auto& w : reg.warnings) report.warnings.push_back("registration: " + w);
  }

  if (cfg.log_domain)
    for (Image& f : frames) f = log_compress(f, cfg.log_eps).image;
  report.domain = cfg.log_domain ? "log" : "linear";
  try {
    report.single_frame = evaluate(frames.front(), rois);
  } catch (const Error& e) {
    report.warnings.push_back(std::string("single-frame metrics: ") + e.what());
  }
  return {std::move(frames), std::move(coverage), std::move(rois), std::move(report)};
}

// Row-major pixel indices covered by every one of the first n aligned frames.
std::vector<Eigen::Index> common_pixels(const std::vector<Mask>& coverage, int n) {
  Mask all = coverage.front();
  for (int i = 1; i < n; ++i) all = all && coverage[static_cast<std::size_t>(i)];
  std::vector<Eigen::Index> idx;
  for (Eigen::Index y = 0; y < all.rows(); ++y)
    for (Eigen::Index x = 0; x < all.cols(); ++x)
      if (all(y, x)) idx.push_back(y * all.cols() + x);
  return idx;
}

// After registration the unmixing is estimated on the pixels every frame
// covers, so mean-filled borders do not enter the estimate; sources are then
// computed for the whole frame.
UnmixingResult unmix(const Prepared& prep, const DataMatrix& X, int n, const IcaConfig& ica) {
  if (prep.coverage.empty()) return separate(X, ica);
  const std::vector<Eigen::Index> pixels = common_pixels(prep.coverage, n);
  const auto count = static_cast<Eigen::Index>(pixels.size());
  if (count == X.samples()) return separate(X, ica);
  if (count < std::max<Eigen::Index>(2 * n, X.samples() / 10)) {
    UnmixingResult res = separate(X, ica);
    res.warnings.push_back("common registered area too small; unmixing estimated on all pixels");
    return res;
  }
  const Matrix fitted = X.values()(Eigen::all, pixels);
  UnmixingResult res = separate(DataMatrix(fitted), ica);
  const Vector means = fitted.rowwise().mean();
  res.sources = res.W_total * (X.values().colwise() - means);
  return res;
}

IcaConfig cell_config(const PipelineConfig& cfg, Algorithm a) {
  IcaConfig ica = cfg.ica.at(a);
  ica.seed = cfg.seed;
  return ica;
}

CellReport run_cell(const PipelineConfig& cfg, const Prepared& prep, Method method, int n) {
  CellReport cell;
  cell.method = method;
  cell.n_frames = n;
  const ImageStack subset(prep.frames.begin(), prep.frames.begin() + n);
  const Eigen::Index h = subset.front().height(), w = subset.front().width();
  try {
    Image out;
    if (method == Method::Median || method == Method::Average) {
      const auto start = std::chrono::steady_clock::now();
      out = method == Method::Median ? median_baseline(subset) : average_baseline(subset);
      cell.elapsed_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    } else {
      const Image reference = median_baseline(subset);
      const DataMatrix X = build_data_matrix(subset);
      const UnmixingResult res = unmix(prep, X, n, cell_config(cfg, *as_algorithm(method)));
      cell.elapsed_seconds = res.elapsed_seconds;
      cell.converged = res.converged;
      cell.iterations = res.iterations;
      cell.warnings = res.warnings;
      const Selection sel = select_signal_component(res, reference);
      cell.selection = sel;
      out = reconstruct_image(res.sources.row(sel.index), sel.sign, sel.scale, sel.offset, h, w);
    }
    MetricsReport m = evaluate(out, prep.rois);
    m.elapsed_seconds = cell.elapsed_seconds;
    for (const auto* s : {&m.snr_db, &m.cnr, &m.enl})
      for (const auto& wmsg : s->warnings) cell.warnings.push_back(wmsg);
    cell.metrics = std::move(m);
    cell.image = std::move(out);
  } catch (const Error& e) {
    cell.error = e.what();
    cell.converged = false;
  }
  return cell;
}

std::string image_name(Method m, int n) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_n%03d.pgm", std::string(to_string(m)).c_str(), n);
  return buf;
}

void write_outputs(const PipelineConfig& cfg, const RunReport& report) {
  const auto& dir = *cfg.output_dir;
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "report.csv");
    if (!csv) fail(ErrorKind::Io, "cannot write " + (dir / "report.csv").string());
    csv << format_report_csv(report);
  }
  if (cfg.write_images)
    for (const CellReport& c : report.cells)
      if (c.image) write_pgm16(dir / image_name(c.method, c.n_frames), *c.image);

  std::ofstream log(dir / "run.log");
  log << "domain " << report.domain << "\n";
  log << "registered " << (report.registered ? "yes" : "no") << "\n";
  for (std::size_t i = 0; i < report.transforms.size(); ++i) {
    const RigidTransform& t = report.transforms[i];
    log << "frame " << i << " dx " << t.dx << " dy " << t.dy << " theta_deg " << degrees(t.theta)
        << " ncc " << report.registration_quality[i] << "\n";
  }
  for (const auto& w : report.warnings) log << "warning " << w << "\n";
  for (const CellReport& c : report.cells) {
    log << "cell " << to_string(c.method) << " n=" << c.n_frames;
    if (c.error) {
      log << " error " << *c.error << "\n";
      continue;
    }
    log << " converged " << c.converged << " iterations " << c.iterations << " elapsed_s "
        << c.elapsed_seconds;
    if (c.selection)
      log << " component " << c.selection->index << " sign " << c.selection->sign << " scale "
          << c.selection->scale << " offset " << c.selection->offset << " corr "
          << c.selection->correlation;
    log << "\n";
    for (const auto& w : c.warnings) log << "  warning " << w << "\n";
  }
}

}  // namespace

RunReport run_pipeline(const PipelineConfig& cfg) {
  Prepared prep = prepare(cfg);

  std::vector<std::pair<Method, int>> jobs;
  for (int n : cfg.subset_sizes)
    for (Method m : cfg.methods) jobs.emplace_back(m, n);

  std::vector<CellReport> cells(jobs.size());
  std::mutex guard;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(guard);
        if (next >= jobs.size()) return;
        i = next++;
      }
      CellReport c = run_cell(cfg, prep, jobs[i].first, jobs[i].second);
      std::lock_guard lock(guard);
      cells[i] = std::move(c);
    }
  };
  const unsigned threads = cfg.timing ? 1u : std::max(1u, cfg.jobs);
  {
    std::vector<std::jthread> pool;
    for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
  }

  RunReport report = std::move(prep.report);
  report.cells = std::move(cells);
  if (cfg.output_dir) write_outputs(cfg, report);
  return report;
}

std::vector<TimingRow> run_timing(const PipelineConfig& cfg) {
  PipelineConfig serial = cfg;
  serial.timing = true;
  const Prepared prep = prepare(serial);
  std::vector<TimingRow> rows;
  for (int n : cfg.subset_sizes) {
    for (Method m : cfg.methods) {
      const ImageStack subset(prep.frames.begin(), prep.frames.begin() + n);
      TimingRow row{m, n, 0.0, 0, true};
      if (auto a = as_algorithm(m)) {
        const UnmixingResult res = unmix(prep, build_data_matrix(subset), n, cell_config(cfg, *a));
        row.elapsed_seconds = res.elapsed_seconds;
        row.iterations = res.iterations;
        row.converged = res.converged;
      } else {
        const auto start = std::chrono::steady_clock::now();
        const Image out = m == Method::Median ? median_baseline(subset) : average_baseline(subset);
        row.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace despeckle
