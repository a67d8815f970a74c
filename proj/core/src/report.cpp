#include "despeckle/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace despeckle {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::string format_report_csv(const RunReport& report, bool with_elapsed) {
  std::ostringstream out;
  out << "algorithm,n_frames,roi_id,snr_db,cnr,enl,elapsed_s,converged\n";
  for (const CellReport& c : report.cells) {
    const std::string elapsed = with_elapsed ? num(c.elapsed_seconds) : "";
    const std::string head = std::string(to_string(c.method)) + "," + std::to_string(c.n_frames);
    const char* conv = c.converged ? "1" : "0";
    if (!c.metrics) {
      out << head << ",error,nan,nan,nan," << elapsed << "," << conv << "\n";
      continue;
    }
    const MetricsReport& m = *c.metrics;
    for (std::size_t i = 0; i < m.roi_ids.size(); ++i)
      out << head << "," << m.roi_ids[i] << "," << num(m.snr_db.per_roi[i]) << ","
          << num(m.cnr.per_roi[i]) << "," << num(m.enl.per_roi[i]) << "," << elapsed << ","
          << conv << "\n";
    out << head << ",mean," << num(m.snr_db.mean) << "," << num(m.cnr.mean) << ","
        << num(m.enl.mean) << "," << elapsed << "," << conv << "\n";
  }
  return out.str();
}

std::string format_timing_csv(const std::vector<TimingRow>& rows) {
  std::ostringstream out;
  out << "algorithm,n_frames,elapsed_s,iterations,converged\n";
  for (const TimingRow& r : rows)
    out << to_string(r.method) << "," << r.n_frames << "," << num(r.elapsed_seconds) << ","
        << r.iterations << "," << (r.converged ? 1 : 0) << "\n";
  return out.str();
}

}  // namespace despeckle
