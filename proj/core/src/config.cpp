#include "despeckle/config.hpp"
#include "despeckle/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace despeckle {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view text, std::string_view what) {
  const std::string t = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
    fail(ErrorKind::Config, std::string(what) + ": cannot parse '" + t + "'");
  return value;
}

bool parse_bool(std::string_view text, std::string_view what) {
  const std::string t = trim(text);
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  fail(ErrorKind::Config, std::string(what) + ": expected a boolean, got '" + t + "'");
}

using Setter = std::function<void(PipelineConfig&, const std::string&)>;
using Section = std::map<std::string, Setter>;

IcaConfig& ica(PipelineConfig& c, Algorithm a) { return c.ica.at(a); }

std::map<std::string, Section> schema(const std::filesystem::path& base) {
  auto path_of = [base](const std::string& v) {
    std::filesystem::path p(trim(v));
    return p.is_relative() && !base.empty() ? base / p : p;
  };
  std::map<std::string, Section> s;
  s["input"] = {
      {"source",
       [](PipelineConfig& c, const std::string& v) {
         const std::string t = trim(v);
         if (t == "synthetic") {
           c.input_dir.reset();
         } else if (t == "directory") {
           if (!c.input_dir) c.input_dir = std::filesystem::path{};
         } else {
           fail(ErrorKind::Config, "input.source must be 'synthetic' or 'directory'");
         }
       }},
      {"directory", [path_of](PipelineConfig& c, const std::string& v) { c.input_dir = path_of(v); }},
      {"pre_aligned",
       [](PipelineConfig& c, const std::string& v) { c.pre_aligned = parse_bool(v, "input.pre_aligned"); }},
  };
  s["phantom"] = {
      {"width", [](PipelineConfig& c, const std::string& v) { c.phantom.width = parse_number<long>(v, "phantom.width"); }},
      {"height", [](PipelineConfig& c, const std::string& v) { c.phantom.height = parse_number<long>(v, "phantom.height"); }},
      {"looks", [](PipelineConfig& c, const std::string& v) { c.phantom.looks = parse_number<double>(v, "phantom.looks"); }},
      {"frames", [](PipelineConfig& c, const std::string& v) { c.phantom.frames = parse_number<int>(v, "phantom.frames"); }},
      {"jitter", [](PipelineConfig& c, const std::string& v) { c.phantom.jitter = parse_jitter(v); }},
  };
  s["run"] = {
      {"algorithms",
       [](PipelineConfig& c, const std::string& v) {
         c.methods.clear();
         for (const std::string& name : split(v, ',')) {
           const auto m = parse_method(name);
           if (!m) fail(ErrorKind::Config, "run.algorithms: unknown algorithm '" + name + "'");
           c.methods.push_back(*m);
         }
       }},
      {"subset_sizes", [](PipelineConfig& c, const std::string& v) { c.subset_sizes = parse_int_list(v); }},
      {"log_domain", [](PipelineConfig& c, const std::string& v) { c.log_domain = parse_bool(v, "run.log_domain"); }},
      {"log_eps", [](PipelineConfig& c, const std::string& v) { c.log_eps = parse_number<double>(v, "run.log_eps"); }},
      {"seed", [](PipelineConfig& c, const std::string& v) { c.seed = parse_number<std::uint64_t>(v, "run.seed"); }},
      {"jobs", [](PipelineConfig& c, const std::string& v) { c.jobs = parse_number<unsigned>(v, "run.jobs"); }},
      {"timing", [](PipelineConfig& c, const std::string& v) { c.timing = parse_bool(v, "run.timing"); }},
  };
  s["registration"] = {
      {"mode",
       [](PipelineConfig& c, const std::string& v) {
         const std::string t = trim(v);
         if (t == "auto") c.registration_mode = RegistrationMode::Auto;
         else if (t == "on") c.registration_mode = RegistrationMode::On;
         else if (t == "off") c.registration_mode = RegistrationMode::Off;
         else fail(ErrorKind::Config, "registration.mode must be auto, on or off");
       }},
      {"theta_range_deg", [](PipelineConfig& c, const std::string& v) { c.registration.theta_range = radians(parse_number<double>(v, "registration.theta_range_deg")); }},
      {"theta_step_deg", [](PipelineConfig& c, const std::string& v) { c.registration.theta_step = radians(parse_number<double>(v, "registration.theta_step_deg")); }},
      {"levels", [](PipelineConfig& c, const std::string& v) { c.registration.levels = parse_number<int>(v, "registration.levels"); }},
      {"min_quality", [](PipelineConfig& c, const std::string& v) { c.registration.min_quality = parse_number<double>(v, "registration.min_quality"); }},
      {"smoothing", [](PipelineConfig& c, const std::string& v) { c.registration.smoothing = parse_number<double>(v, "registration.smoothing"); }},
      {"border_margin", [](PipelineConfig& c, const std::string& v) { c.registration.border_margin = parse_number<double>(v, "registration.border_margin"); }},
      {"template_passes", [](PipelineConfig& c, const std::string& v) { c.registration.template_passes = parse_number<int>(v, "registration.template_passes"); }},
      {"threads", [](PipelineConfig& c, const std::string& v) { c.registration.threads = parse_number<unsigned>(v, "registration.threads"); }},
  };
  s["metrics"] = {
      {"rois",
       [path_of](PipelineConfig& c, const std::string& v) {
         if (trim(v).empty()) c.roi_path.reset();
         else c.roi_path = path_of(v);
       }},
  };
  s["output"] = {
      {"directory", [path_of](PipelineConfig& c, const std::string& v) { c.output_dir = path_of(v); }},
      {"write_images", [](PipelineConfig& c, const std::string& v) { c.write_images = parse_bool(v, "output.write_images"); }},
  };
  s["infomax"] = {
      {"learning_rate",
       [](PipelineConfig& c, const std::string& v) {
         if (trim(v) == "auto") ica(c, Algorithm::InfoMax).learning_rate.reset();
         else ica(c, Algorithm::InfoMax).learning_rate = parse_number<double>(v, "infomax.learning_rate");
       }},
      {"anneal", [](PipelineConfig& c, const std::string& v) { ica(c, Algorithm::InfoMax).anneal = parse_number<double>(v, "infomax.anneal"); }},
      {"batch_size", [](PipelineConfig& c, const std::string& v) { ica(c, Algorithm::InfoMax).batch_size = parse_number<int>(v, "infomax.batch_size"); }},
      {"tol", [](PipelineConfig& c, const std::string& v) { ica(c, Algorithm::InfoMax).tol = parse_number<double>(v, "infomax.tol"); }},
      {"max_iters", [](PipelineConfig& c, const std::string& v) { ica(c, Algorithm::InfoMax).max_iters = parse_number<int>(v, "infomax.max_iters"); }},
      {"extended", [](PipelineConfig& c, const std::string& v) { ica(c, Algorithm::InfoMax).extended = parse_bool(v, "infomax.extended"); }},
  };
  s["fastica"] = {
      {"contrast",
       [](PipelineConfig& c, const std::string& v) {
         const std::string t = trim(v);
         Contrast& k = ica(c, Algorithm::FastIca).contrast;
         if (t == "logcosh") k.kind = ContrastKind::LogCosh;
         else if (t == "gauss") k.kind = ContrastKind::Gauss;
         else fail(ErrorKind::Config, "fastica.contrast must be logcosh or gauss");
       }},
      {"a1", [](PipelineConfig& c, const std::string& v) { ica(c, Algorithm::FastIca).contrast.a1 = parse_number<double>(v, "fastica.a1"); }},
      {"tol", [](PipelineConfig& c, const std::string& v) { ica(c, Algorithm::FastIca).tol = parse_number<double>(v, "fastica.tol"); }},
      {"max_iters", [](PipelineConfig& c, const std::string& v) { ica(c, Algorithm::FastIca).max_iters = parse_number<int>(v, "fastica.max_iters"); }},
  };
  s["jade"] = {
      {"tol", [](PipelineConfig& c, const std::string& v) { ica(c, Algorithm::Jade).tol = parse_number<double>(v, "jade.tol"); }},
      {"max_sweeps", [](PipelineConfig& c, const std::string& v) { ica(c, Algorithm::Jade).max_iters = parse_number<int>(v, "jade.max_sweeps"); }},
  };
  s["sobi"] = {
      {"lags",
       [](PipelineConfig& c, const std::string& v) {
         auto& lags = ica(c, Algorithm::Sobi).lags;
         lags.clear();
         for (int p : parse_int_list(v)) lags.push_back(p);
       }},
      {"tol", [](PipelineConfig& c, const std::string& v) { ica(c, Algorithm::Sobi).tol = parse_number<double>(v, "sobi.tol"); }},
      {"max_sweeps", [](PipelineConfig& c, const std::string& v) { ica(c, Algorithm::Sobi).max_iters = parse_number<int>(v, "sobi.max_sweeps"); }},
  };
  return s;
}

}  // namespace

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  for (const std::string& item : split(text, ',')) {
    if (item.empty()) fail(ErrorKind::Config, "empty entry in list '" + std::string(text) + "'");
    const auto dash = item.find('-', 1);
    if (dash == std::string::npos) {
      out.push_back(parse_number<int>(item, "list entry"));
      continue;
    }
    const auto colon = item.find(':', dash);
    const int lo = parse_number<int>(item.substr(0, dash), "range start");
    const int hi = parse_number<int>(item.substr(dash + 1, colon == std::string::npos
                                                               ? std::string::npos
                                                               : colon - dash - 1),
                                     "range end");
    const int step = colon == std::string::npos ? 1 : parse_number<int>(item.substr(colon + 1), "range step");
    if (step < 1 || hi < lo) fail(ErrorKind::Config, "bad range '" + item + "'");
    for (int v = lo; v <= hi; v += step) out.push_back(v);
  }
  return out;
}

Jitter parse_jitter(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) fail(ErrorKind::Config, "jitter must be 'dx,dy,deg'");
  const Jitter j{parse_number<double>(parts[0], "jitter dx"), parse_number<double>(parts[1], "jitter dy"),
                 radians(parse_number<double>(parts[2], "jitter degrees"))};
  if (j.max_shift_x < 0.0 || j.max_shift_y < 0.0 || j.max_theta < 0.0)
    fail(ErrorKind::Config, "jitter bounds must be non-negative");
  return j;
}

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::Config, std::string("malformed configuration: ") + e.message() + " (line " +
                                std::to_string(e.line()) + ")");
  }

  const auto sections = schema(base_dir);
  PipelineConfig cfg;
  cfg.output_dir = base_dir.empty() ? std::filesystem::path("despeckle-out")
                                    : base_dir / "despeckle-out";
  for (const auto& [section, keys] : tree) {
    if (keys.empty() && !keys.data().empty())
      fail(ErrorKind::Config, "key '" + section + "' must appear inside a [section]");
    const auto s = sections.find(section);
    if (s == sections.end()) fail(ErrorKind::Config, "unknown section [" + section + "]");
    for (const auto& [key, value] : keys) {
      const auto k = s->second.find(key);
      if (k == s->second.end())
        fail(ErrorKind::Config, "unknown key '" + key + "' in [" + section + "]");
      k->second(cfg, value.data());
    }
  }
  if (cfg.input_dir && cfg.input_dir->empty())
    fail(ErrorKind::Config, "input.source = directory needs input.directory");
  try {
    cfg.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Config, e.what());
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open configuration " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

std::string default_config_text() {
  return R"(# despeckle run configuration. Every key is optional; values shown are defaults.

[input]
# synthetic: speckled retina phantom; directory: *.pgm frames sorted by name
source = synthetic
# directory = frames/
# frames already aligned; skips registration in auto mode
pre_aligned = false

[phantom]
width = 160
height = 128
# gamma shape of the multiplicative speckle
looks = 4
frames = 50
# max |dx| px, max |dy| px, max |theta| degrees
jitter = 0,0,0

[run]
# any of infomax, fastica, jade, sobi, median, average
algorithms = infomax,fastica,jade,sobi,median
# first-N subsets; lists accept ranges such as 5-50:5
subset_sizes = 5-50:5
log_domain = true
log_eps = 0.0001
seed = 1
# concurrent (algorithm, N) cells; timing = true forces serial execution
jobs = 1
timing = true

[registration]
# auto registers unless the input is pre-aligned or a still synthetic stack
mode = auto
theta_range_deg = 5
theta_step_deg = 0.5
levels = 3
min_quality = 0.3
# Gaussian blur sigma (pixels) applied to each frame before the log map used for matching
smoothing = 1.5
# refinement rounds against the mean of the aligned frames
template_passes = 1
# fraction of each side excluded from the NCC score (mean-filled borders)
border_margin = 0.1
# 0 uses every hardware thread
threads = 0

[metrics]
# ROI file with 'kind x y w h' lines; empty uses the phantom ROIs
rois =

[output]
directory = despeckle-out
write_images = true

[infomax]
# auto resolves to 0.01 / ln(d + 1)
learning_rate = auto
anneal = 0.9
batch_size = 256
tol = 1e-6
max_iters = 512
extended = false

[fastica]
# logcosh or gauss
contrast = logcosh
a1 = 1
tol = 1e-7
max_iters = 200

[jade]
tol = 1e-8
max_sweeps = 100

[sobi]
lags = 1-10
tol = 1e-8
max_sweeps = 100
)";
}

}  // namespace despeckle
