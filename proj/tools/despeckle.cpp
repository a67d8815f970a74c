// despeckle: command line front end for the speckle-reduction pipeline.
//
//   despeckle run     --config run.ini
//   despeckle synth   --clean clean.pgm --looks 4 --frames 20 --jitter 4,4,1 --seed 7 --out dir
//   despeckle metrics --image img.pgm --rois rois.txt
//   despeckle bench   --config run.ini
//
// DESPECKLE_VERBOSITY (0 quiet, 1 summary [default], 2 per-cell detail) controls
// what is echoed to stderr.

#include "despeckle/config.hpp"
#include "despeckle/error.hpp"
#include "despeckle/metrics.hpp"
#include "despeckle/pgm.hpp"
#include "despeckle/pipeline.hpp"
#include "despeckle/speckle.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace despeckle;

namespace {

int verbosity() {
  const char* v = std::getenv("DESPECKLE_VERBOSITY");
  if (!v || !*v) return 1;
  return std::atoi(v);
}

void print_metrics(std::ostream& out, const MetricsReport& m) {
  out << "roi_id,snr_db,cnr,enl\n";
  for (std::size_t i = 0; i < m.roi_ids.size(); ++i)
    out << m.roi_ids[i] << ',' << m.snr_db.per_roi[i] << ',' << m.cnr.per_roi[i] << ','
        << m.enl.per_roi[i] << '\n';
  out << "mean," << m.snr_db.mean << ',' << m.cnr.mean << ',' << m.enl.mean << '\n';
}

int cmd_run(const fs::path& config) {
  const PipelineConfig cfg = load_config(config);
  const RunReport report = run_pipeline(cfg);
  const int v = verbosity();
  if (v >= 1) {
    std::cerr << "domain " << report.domain << ", " << report.cells.size() << " cells";
    if (cfg.output_dir) std::cerr << ", outputs in " << cfg.output_dir->string();
    std::cerr << '\n';
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  }
  int failed = 0;
  for (const CellReport& c : report.cells) {
    if (c.error) ++failed;
    if (v >= 2 || (v >= 1 && c.error)) {
      std::cerr << to_string(c.method) << " N=" << c.n_frames;
      if (c.error) {
        std::cerr << " failed: " << *c.error << '\n';
        continue;
      }
      std::cerr << " snr " << c.metrics->snr_db.mean << " dB, cnr " << c.metrics->cnr.mean
                << ", enl " << c.metrics->enl.mean << ", " << c.elapsed_seconds << " s\n";
    }
  }
  if (!cfg.output_dir) std::cout << format_report_csv(report);
  return failed == 0 ? 0 : 3;
}

int cmd_synth(const fs::path& clean_path, double looks, int frames, const std::string& jitter,
              std::uint64_t seed, const fs::path& out_dir) {
  const Image clean = read_pgm(clean_path);
  const SpeckleConfig cfg{looks, frames, parse_jitter(jitter), seed};
  const SpeckleStack stack = generate_speckle_stack(clean, cfg);
  fs::create_directories(out_dir);
  std::ofstream truth(out_dir / "transforms.csv");
  truth << "frame,dx,dy,theta_deg\n";
  for (std::size_t i = 0; i < stack.frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04zu.pgm", i);
    write_pgm16(out_dir / name, stack.frames[i]);
    const RigidTransform& t = stack.truth[i];
    truth << i << ',' << t.dx << ',' << t.dy << ',' << degrees(t.theta) << '\n';
  }
  if (verbosity() >= 1)
    std::cerr << "wrote " << stack.frames.size() << " frames to " << out_dir.string() << '\n';
  return 0;
}

int cmd_metrics(const fs::path& image, const fs::path& rois) {
  print_metrics(std::cout, evaluate(read_pgm(image), load_rois(rois)));
  return 0;
}

int cmd_bench(const fs::path& config) {
  const PipelineConfig cfg = load_config(config);
  std::cout << format_timing_csv(run_timing(cfg));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ICA-based speckle reduction for stacks of repeated B-scans"};
  app.require_subcommand(1);

  fs::path run_config;
  auto* run = app.add_subcommand("run", "Run the configured experiment and write its report");
  run->add_option("--config", run_config, "Run configuration (INI)")->required()->check(CLI::ExistingFile);

  fs::path clean, out_dir;
  double looks = 4.0;
  int frames = 10;
  std::string jitter = "0,0,0";
  std::uint64_t seed = 0;
  auto* synth = app.add_subcommand("synth", "Generate a speckled, jittered stack from a clean image");
  synth->add_option("--clean", clean, "Clean image (binary PGM)")->required()->check(CLI::ExistingFile);
  synth->add_option("--looks", looks, "Gamma shape L of the speckle")->check(CLI::PositiveNumber);
  synth->add_option("--frames", frames, "Number of frames")->check(CLI::PositiveNumber);
  synth->add_option("--jitter", jitter, "Max |dx| px, |dy| px, |theta| degrees");
  synth->add_option("--seed", seed, "Random seed");
  synth->add_option("--out", out_dir, "Output directory")->required();

  fs::path image, rois;
  auto* metrics = app.add_subcommand("metrics", "SNR, CNR and ENL of an image over ROIs");
  metrics->add_option("--image", image, "Image (binary PGM)")->required()->check(CLI::ExistingFile);
  metrics->add_option("--rois", rois, "ROI file")->required()->check(CLI::ExistingFile);

  fs::path bench_config;
  auto* bench = app.add_subcommand("bench", "Time each estimator per subset size (CSV on stdout)");
  bench->add_option("--config", bench_config, "Run configuration (INI)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_config);
    if (*synth) return cmd_synth(clean, looks, frames, jitter, seed, out_dir);
    if (*metrics) return cmd_metrics(image, rois);
    if (*bench) return cmd_bench(bench_config);
  } catch (const Error& e) {
    std::cerr << "despeckle: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
