#include "despeckle/registration.hpp"
#include "despeckle/error.hpp"

#include <boost/math/tools/minima.hpp>
#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <thread>

namespace despeckle {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct Point {
  double x, y;
};

Point image_center(const Matrix& m) {
  return {0.5 * static_cast<double>(m.cols() - 1), 0.5 * static_cast<double>(m.rows() - 1)};
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a <= -std::numbers::pi ? a + 2.0 * std::numbers::pi : a;
}

bool inside(Eigen::Index rows, Eigen::Index cols, double x, double y) {
  constexpr double slack = 1e-9;
  return x >= -slack && y >= -slack && x <= static_cast<double>(cols - 1) + slack &&
         y <= static_cast<double>(rows - 1) + slack;
}

// Bilinear sample; false when (x, y) falls outside the pixel grid.
bool sample(const Matrix& m, double x, double y, double& value) {
  if (!inside(m.rows(), m.cols(), x, y)) return false;
  const double w = static_cast<double>(m.cols() - 1);
  const double h = static_cast<double>(m.rows() - 1);
  x = std::clamp(x, 0.0, w);
  y = std::clamp(y, 0.0, h);
  const auto x0 = static_cast<Eigen::Index>(std::floor(x));
  const auto y0 = static_cast<Eigen::Index>(std::floor(y));
  const Eigen::Index x1 = std::min<Eigen::Index>(x0 + 1, m.cols() - 1);
  const Eigen::Index y1 = std::min<Eigen::Index>(y0 + 1, m.rows() - 1);
  const double fx = x - static_cast<double>(x0);
  const double fy = y - static_cast<double>(y0);
  const double top = m(y0, x0) * (1.0 - fx) + m(y0, x1) * fx;
  const double bottom = m(y1, x0) * (1.0 - fx) + m(y1, x1) * fx;
  value = top * (1.0 - fy) + bottom * fy;
  return true;
}

std::vector<std::complex<double>> forward_fft(std::vector<double>& data, int h, int w) {
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(h) * (w / 2 + 1));
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_2d(h, w, data.data(), reinterpret_cast<fftw_complex*>(spec.data()),
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return spec;
}

std::vector<double> inverse_fft(std::vector<std::complex<double>>& spec, int h, int w) {
  std::vector<double> out(static_cast<std::size_t>(h) * w);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_c2r_2d(h, w, reinterpret_cast<fftw_complex*>(spec.data()), out.data(),
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

// Row-major, mean-removed copy ready for FFTW.
std::vector<double> prepare(const Matrix& m) {
  const double mean = m.mean();
  const double spread = (m.array() - mean).abs().maxCoeff();
  if (!(spread > 1e-12)) fail(ErrorKind::NoSignal, "image has constant intensity");
  std::vector<double> out(static_cast<std::size_t>(m.size()));
  std::size_t i = 0;
  for (Eigen::Index y = 0; y < m.rows(); ++y)
    for (Eigen::Index x = 0; x < m.cols(); ++x) out[i++] = m(y, x) - mean;
  return out;
}

double parabolic_offset(double left, double mid, double right) {
  const double denom = left - 2.0 * mid + right;
  if (!(std::abs(denom) > 1e-300)) return 0.0;
  return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
}

Matrix downsample(const Matrix& m) {
  const Eigen::Index h = m.rows() / 2, w = m.cols() / 2;
  Matrix out(h, w);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x)
      out(y, x) = 0.25 * (m(2 * y, 2 * x) + m(2 * y + 1, 2 * x) + m(2 * y, 2 * x + 1) +
                          m(2 * y + 1, 2 * x + 1));
  return out;
}

RigidEstimate score(const Image& ref, const Image& mov, const RigidTransform& t, double margin);

RigidEstimate evaluate_angle(const Image& ref, const Image& mov, double theta, double margin) {
  const Image rotated = warp_rigid(mov, {0.0, 0.0, -theta});
  const Translation s = estimate_translation(ref, rotated);
  const double c = std::cos(theta), sn = std::sin(theta);
  const RigidTransform t{c * s.dx - sn * s.dy, sn * s.dx + c * s.dy, theta};
  return score(ref, mov, t, margin);
}

bool better(const RigidEstimate& a, const RigidEstimate& b) {
  constexpr double eps = 1e-12;
  if (a.ncc > b.ncc + eps) return true;
  if (a.ncc < b.ncc - eps) return false;
  return std::abs(a.transform.theta) < std::abs(b.transform.theta);
}

RigidEstimate grid_search(const Image& ref, const Image& mov, double centre, double half_range,
                          double step, double margin) {
  const int n = step > 0.0 ? static_cast<int>(std::floor(half_range / step + 1e-9)) : 0;
  RigidEstimate best = evaluate_angle(ref, mov, centre, margin);
  for (int k = 1; k <= n; ++k) {
    for (double sign : {-1.0, 1.0}) {
      const RigidEstimate e = evaluate_angle(ref, mov, centre + sign * k * step, margin);
      if (better(e, best)) best = e;
    }
  }
  return best;
}

RigidEstimate golden_refine(const Image& ref, const Image& mov, RigidEstimate best, double lo,
                            double hi, double margin) {
  constexpr double stop = 0.01 * std::numbers::pi / 180.0;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - ratio * (b - a), x2 = a + ratio * (b - a);
  RigidEstimate f1 = evaluate_angle(ref, mov, x1, margin);
  RigidEstimate f2 = evaluate_angle(ref, mov, x2, margin);
  while (b - a > stop) {
    if (f1.ncc >= f2.ncc) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = evaluate_angle(ref, mov, x1, margin);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = evaluate_angle(ref, mov, x2, margin);
    }
  }
  for (const RigidEstimate& e : {f1, f2})
    if (better(e, best)) best = e;
  return best;
}

RigidEstimate refine_ncc(const Image& ref, const Image& mov, RigidEstimate best, double margin);

}  // namespace

double degrees(double r) noexcept { return r * 180.0 / std::numbers::pi; }
double radians(double d) noexcept { return d * std::numbers::pi / 180.0; }

RigidTransform RigidTransform::inverse() const {
  const double c = std::cos(theta), s = std::sin(theta);
  // -R(-theta) d
  return {-(c * dx + s * dy), -(-s * dx + c * dy), wrap_angle(-theta)};
}

RigidTransform RigidTransform::then(const RigidTransform& after) const {
  const double c = std::cos(after.theta), s = std::sin(after.theta);
  return {c * dx - s * dy + after.dx, s * dx + c * dy + after.dy,
          wrap_angle(theta + after.theta)};
}

Translation estimate_translation(const Image& ref, const Image& mov) {
  require(ref.height() == mov.height() && ref.width() == mov.width(),
          "translation estimate needs equally sized images");
  const int h = static_cast<int>(ref.height());
  const int w = static_cast<int>(ref.width());
  std::vector<double> a = prepare(ref.pixels());
  std::vector<double> b = prepare(mov.pixels());
  const auto fa = forward_fft(a, h, w);
  auto fb = forward_fft(b, h, w);

  double peak_mag = 0.0;
  for (std::size_t i = 0; i < fb.size(); ++i) {
    fb[i] *= std::conj(fa[i]);
    peak_mag = std::max(peak_mag, std::abs(fb[i]));
  }
  if (!(peak_mag > 0.0)) fail(ErrorKind::NoSignal, "images share no spectral content");
  const double floor = 1e-3 * peak_mag;
  for (auto& v : fb) v /= std::abs(v) + floor;
  const std::vector<double> corr = inverse_fft(fb, h, w);

  const auto at = [&](int y, int x) {
    y = (y % h + h) % h;
    x = (x % w + w) % w;
    return corr[static_cast<std::size_t>(y) * w + x];
  };
  int py = 0, px = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (at(y, x) > best) {
        best = at(y, x);
        py = y;
        px = x;
      }

  const double oy = h > 2 ? parabolic_offset(at(py - 1, px), best, at(py + 1, px)) : 0.0;
  const double ox = w > 2 ? parabolic_offset(at(py, px - 1), best, at(py, px + 1)) : 0.0;
  const int sy = py > h / 2 ? py - h : py;
  const int sx = px > w / 2 ? px - w : px;
  return {static_cast<double>(sx) + ox, static_cast<double>(sy) + oy};
}

namespace {

// NCC over ref pixels whose mapped position lies inside mov, with both points
// kept `margin` (fraction of each side) away from the frame edges. The overlap
// is always measured without the margin.
RigidEstimate score(const Image& ref, const Image& mov, const RigidTransform& t, double margin) {
  require(ref.height() == mov.height() && ref.width() == mov.width(),
          "alignment score needs equally sized images");
  const Matrix& r = ref.pixels();
  const Matrix& m = mov.pixels();
  const Point c = image_center(r);
  const double ct = std::cos(t.theta), st = std::sin(t.theta);
  const double mx = margin * static_cast<double>(r.cols());
  const double my = margin * static_cast<double>(r.rows());
  const double xmax = static_cast<double>(r.cols() - 1) - mx;
  const double ymax = static_cast<double>(r.rows() - 1) - my;

  double covered = 0, n = 0, sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (Eigen::Index y = 0; y < r.rows(); ++y) {
    for (Eigen::Index x = 0; x < r.cols(); ++x) {
      const double qx = static_cast<double>(x) - c.x, qy = static_cast<double>(y) - c.y;
      const double px = ct * qx - st * qy + c.x + t.dx, py = st * qx + ct * qy + c.y + t.dy;
      double v;
      if (!sample(m, px, py, v)) continue;
      covered += 1;
      const auto xf = static_cast<double>(x), yf = static_cast<double>(y);
      if (xf < mx || xf > xmax || yf < my || yf > ymax) continue;
      if (px < mx || px > xmax || py < my || py > ymax) continue;
      const double a = r(y, x);
      n += 1;
      sa += a;
      sb += v;
      saa += a * a;
      sbb += v * v;
      sab += a * v;
    }
  }
  RigidEstimate e{t, 0.0, covered / static_cast<double>(r.size())};
  if (n < 2) return e;
  const double cov = sab - sa * sb / n;
  const double va = saa - sa * sa / n;
  const double vb = sbb - sb * sb / n;
  if (va > 0 && vb > 0) e.ncc = cov / std::sqrt(va * vb);
  return e;
}

}  // namespace

RigidEstimate score_alignment(const Image& ref, const Image& mov, const RigidTransform& t) {
  return score(ref, mov, t, 0.0);
}

RigidEstimate estimate_rigid(const Image& ref, const Image& mov, double theta_range,
                             double theta_step) {
  require(theta_range >= 0.0, "theta_range must be non-negative");
  require(theta_range == 0.0 || theta_step > 0.0, "theta_step must be positive");
  constexpr double margin = RegistrationConfig{}.border_margin;
  RigidEstimate best = grid_search(ref, mov, 0.0, theta_range, theta_step, margin);
  if (theta_range > 0.0) {
    const double t0 = best.transform.theta;
    best = golden_refine(ref, mov, best, t0 - theta_step, t0 + theta_step, margin);
  }
  best = refine_ncc(ref, mov, best, margin);
  if (best.overlap < 0.25)
    fail(ErrorKind::RegistrationFailed,
         "overlap after alignment is " + std::to_string(best.overlap * 100.0) + "% of the frame");
  return best;
}

namespace {

// Source position that warp_rigid samples for output pixel (x, y):
// p = R(-theta) (q - c - d) + c.
struct InverseMap {
  InverseMap(Eigen::Index height, Eigen::Index width, const RigidTransform& t)
      : cx(0.5 * static_cast<double>(width - 1)),
        cy(0.5 * static_cast<double>(height - 1)),
        dx(t.dx),
        dy(t.dy),
        ct(std::cos(t.theta)),
        st(std::sin(t.theta)) {}

  Point operator()(Eigen::Index x, Eigen::Index y) const {
    const double qx = static_cast<double>(x) - cx - dx;
    const double qy = static_cast<double>(y) - cy - dy;
    return {ct * qx + st * qy + cx, -st * qx + ct * qy + cy};
  }

  double cx, cy, dx, dy, ct, st;
};

}  // namespace

Image warp_rigid(const Image& img, const RigidTransform& t) {
  if (t.dx == 0.0 && t.dy == 0.0 && t.theta == 0.0) return img;
  const Matrix& src = img.pixels();
  const InverseMap map(src.rows(), src.cols(), t);
  const double fill = src.mean();
  Matrix out(src.rows(), src.cols());
  for (Eigen::Index y = 0; y < src.rows(); ++y) {
    for (Eigen::Index x = 0; x < src.cols(); ++x) {
      const Point p = map(x, y);
      double v;
      out(y, x) = sample(src, p.x, p.y, v) ? v : fill;
    }
  }
  return Image::clamped(std::move(out));
}

Mask warp_coverage(Eigen::Index height, Eigen::Index width, const RigidTransform& t) {
  require(height >= 1 && width >= 1, "coverage needs a positive geometry");
  if (t.dx == 0.0 && t.dy == 0.0 && t.theta == 0.0) return Mask::Constant(height, width, true);
  const InverseMap map(height, width, t);
  Mask out(height, width);
  for (Eigen::Index y = 0; y < height; ++y)
    for (Eigen::Index x = 0; x < width; ++x) {
      const Point p = map(x, y);
      out(y, x) = inside(height, width, p.x, p.y);
    }
  return out;
}

namespace {

// Blurred intensity mapped to log scale in [0, 1], so multiplicative speckle
// turns into weak additive noise before matching.
Image matching_image(const Image& img, double sigma) {
  constexpr double eps = 1e-3;
  const double lo = std::log(eps), hi = std::log1p(eps);
  Matrix m = img.pixels();
  if (sigma > 0.0) {
    const auto radius = static_cast<Eigen::Index>(std::ceil(3.0 * sigma));
    Eigen::VectorXd k(2 * radius + 1);
    for (Eigen::Index i = -radius; i <= radius; ++i)
      k(i + radius) = std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma));
    k /= k.sum();
    const auto reflect = [](Eigen::Index i, Eigen::Index n) {
      if (n == 1) return Eigen::Index{0};
      while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
      return i;
    };
    Matrix tmp(m.rows(), m.cols());
    for (Eigen::Index y = 0; y < m.rows(); ++y)
      for (Eigen::Index x = 0; x < m.cols(); ++x) {
        double acc = 0.0;
        for (Eigen::Index i = -radius; i <= radius; ++i)
          acc += k(i + radius) * m(y, reflect(x + i, m.cols()));
        tmp(y, x) = acc;
      }
    for (Eigen::Index y = 0; y < m.rows(); ++y)
      for (Eigen::Index x = 0; x < m.cols(); ++x) {
        double acc = 0.0;
        for (Eigen::Index i = -radius; i <= radius; ++i)
          acc += k(i + radius) * tmp(reflect(y + i, m.rows()), x);
        m(y, x) = acc;
      }
  }
  m = ((m.array() + eps).log() - lo) / (hi - lo);
  return Image::clamped(std::move(m));
}

// Cyclic coordinate search on (dx, dy, theta) maximizing the overlap NCC.
RigidEstimate refine_ncc(const Image& ref, const Image& mov, RigidEstimate best, double margin) {
  // Express theta as the arc length at half the image extent so all three
  // coordinates move pixels by comparable amounts.
  const double arm = 0.5 * static_cast<double>(std::max(ref.width(), ref.height()));
  const int bits = 30;
  for (int cycle = 0; cycle < 8; ++cycle) {
    const RigidTransform start = best.transform;
    for (int axis = 0; axis < 3; ++axis) {
      const RigidTransform base = best.transform;
      auto at = [&](double v) {
        RigidTransform t = base;
        if (axis == 0) t.dx = v;
        if (axis == 1) t.dy = v;
        if (axis == 2) t.theta = v / arm;
        return t;
      };
      const double origin = axis == 0 ? base.dx : axis == 1 ? base.dy : base.theta * arm;
      const auto [arg, neg] = boost::math::tools::brent_find_minima(
          [&](double v) { return -score(ref, mov, at(v), margin).ncc; }, origin - 1.0,
          origin + 1.0, bits);
      if (-neg > best.ncc) best = score(ref, mov, at(arg), margin);
    }
    const double moved = std::max({std::abs(best.transform.dx - start.dx),
                                   std::abs(best.transform.dy - start.dy),
                                   std::abs(best.transform.theta - start.theta) * arm});
    if (moved < 1e-3) break;
  }
  return best;
}

RigidEstimate register_pair(const std::vector<Image>& ref_pyramid, const Image& mov,
                            const RegistrationConfig& cfg) {
  std::vector<Image> mov_pyramid{mov};
  while (mov_pyramid.size() < ref_pyramid.size())
    mov_pyramid.push_back(Image(downsample(mov_pyramid.back().pixels())));

  const std::size_t top = ref_pyramid.size() - 1;
  double centre = 0.0, half = cfg.theta_range, step = cfg.theta_step;
  for (std::size_t level = top; level > 0; --level) {
    centre = grid_search(ref_pyramid[level], mov_pyramid[level], centre, half, step,
                         cfg.border_margin)
                 .transform.theta;
    half = 2.0 * step;
    step *= 0.5;
  }
  RigidEstimate best = grid_search(ref_pyramid[0], mov_pyramid[0], centre, half, step,
                                   cfg.border_margin);
  if (cfg.theta_range > 0.0 && step > 0.0) {
    const double t0 = best.transform.theta;
    best = golden_refine(ref_pyramid[0], mov_pyramid[0], best, t0 - step, t0 + step,
                         cfg.border_margin);
  }
  best = refine_ncc(ref_pyramid[0], mov_pyramid[0], best, cfg.border_margin);
  if (best.overlap < 0.25)
    fail(ErrorKind::RegistrationFailed,
         "overlap after alignment is " + std::to_string(best.overlap * 100.0) + "% of the frame");
  return best;
}

}  // namespace

StackRegistration register_stack(const ImageStack& stack, const RegistrationConfig& cfg) {
  validate_stack(stack);
  require(stack.size() >= 2, "registration needs at least two frames");
  require(cfg.levels >= 1, "pyramid needs at least one level");
  require(cfg.theta_range >= 0.0, "theta_range must be non-negative");
  require(cfg.theta_range == 0.0 || cfg.theta_step > 0.0, "theta_step must be positive");

  require(cfg.smoothing >= 0.0, "smoothing must be non-negative");
  require(cfg.border_margin >= 0.0 && cfg.border_margin < 0.5, "border_margin must be in [0, 0.5)");
  require(cfg.template_passes >= 0, "template_passes must be non-negative");

  const std::size_t n = stack.size();
  std::vector<Image> matching(n);
  {
    std::atomic<std::size_t> next{0};
    auto prep = [&] {
      for (std::size_t i = next++; i < n; i = next++) matching[i] = matching_image(stack[i], cfg.smoothing);
    };
    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::jthread> pool;
    for (unsigned k = 1; k < std::min<std::size_t>(threads, n); ++k) pool.emplace_back(prep);
    prep();
  }

  std::vector<Image> ref_pyramid{matching.front()};
  while (static_cast<int>(ref_pyramid.size()) < cfg.levels &&
         std::min(ref_pyramid.back().height(), ref_pyramid.back().width()) >= 32)
    ref_pyramid.push_back(Image(downsample(ref_pyramid.back().pixels())));

  StackRegistration out;
  out.aligned.resize(n);
  out.transforms.assign(n, RigidTransform::identity());
  out.quality.assign(n, 1.0);
  out.flagged.assign(n, false);
  std::vector<std::string> errors(n);
  out.aligned[0] = stack[0];

  std::atomic<std::size_t> next{1};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const RigidEstimate e = register_pair(ref_pyramid, matching[i], cfg);
        out.transforms[i] = e.transform;
        out.quality[i] = e.ncc;
      } catch (const Error& err) {
        errors[i] = err.what();
        out.quality[i] = 0.0;
      }
    }
  };
  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n - 1));
  const auto run_pool = [&](auto&& fn) {
    next = 1;
    std::vector<std::jthread> pool;
    for (unsigned k = 1; k < threads; ++k) pool.emplace_back(fn);
    fn();
  };
  run_pool(worker);

  // Re-estimate against the mean of the aligned frames, which carries far less
  // speckle than the single reference frame but shares its geometry.
  for (int pass = 0; pass < cfg.template_passes; ++pass) {
    Matrix sum = matching[0].pixels();
    int count = 1;
    for (std::size_t i = 1; i < n; ++i) {
      if (!errors[i].empty()) continue;
      sum += warp_rigid(matching[i], out.transforms[i].inverse()).pixels();
      ++count;
    }
    const Image templ = Image::clamped(sum / count);
    run_pool([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        if (!errors[i].empty()) continue;
        try {
          const RigidEstimate start = score(templ, matching[i], out.transforms[i], cfg.border_margin);
          const RigidEstimate e = refine_ncc(templ, matching[i], start, cfg.border_margin);
          out.transforms[i] = e.transform;
          out.quality[i] = score(matching[0], matching[i], e.transform, cfg.border_margin).ncc;
        } catch (const Error& err) {
          errors[i] = err.what();
          out.quality[i] = 0.0;
        }
      }
    });
  }

  out.coverage.assign(n, Mask::Constant(stack[0].height(), stack[0].width(), true));
  for (std::size_t i = 1; i < n; ++i) {
    if (!errors[i].empty()) out.transforms[i] = RigidTransform::identity();
    out.aligned[i] = warp_rigid(stack[i], out.transforms[i].inverse());
    out.coverage[i] = warp_coverage(stack[0].height(), stack[0].width(), out.transforms[i].inverse());
  }

  for (std::size_t i = 1; i < n; ++i) {
    if (!errors[i].empty()) {
      out.flagged[i] = true;
      out.warnings.push_back("frame " + std::to_string(i) + ": " + errors[i] +
                             "; identity transform used");
    } else if (out.quality[i] < cfg.min_quality) {
      out.flagged[i] = true;
      out.warnings.push_back("frame " + std::to_string(i) + ": low registration quality (NCC " +
                             std::to_string(out.quality[i]) + ")");
    }
  }
  return out;
}

}  // namespace despeckle
