#include "despeckle/error.hpp"
#include "despeckle/metrics.hpp"

#include <fstream>
#include <sstream>

namespace despeckle {

RoiSet parse_rois(std::string_view text) {
  std::vector<Roi> rois;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string kind;
    if (!(fields >> kind)) continue;
    Roi r;
    if (kind == "background") {
      r.kind = RoiKind::Background;
    } else if (kind == "feature") {
      r.kind = RoiKind::Feature;
    } else {
      fail(ErrorKind::InvalidInput,
           "ROI line " + std::to_string(lineno) + ": unknown kind '" + kind + "'");
    }
    std::string extra;
    if (!(fields >> r.x >> r.y >> r.w >> r.h) || (fields >> extra))
      fail(ErrorKind::InvalidInput,
           "ROI line " + std::to_string(lineno) + ": expected 'kind x y w h'");
    rois.push_back(r);
  }
  return RoiSet(std::move(rois));
}

RoiSet load_rois(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open ROI file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_rois(buf.str());
}

std::string format_rois(const RoiSet& set) {
  std::ostringstream out;
  out << "# kind x y w h\n";
  for (const Roi& r : set.rois())
    out << (r.kind == RoiKind::Background ? "background" : "feature") << ' ' << r.x << ' ' << r.y
        << ' ' << r.w << ' ' << r.h << '\n';
  return out.str();
}

}  // namespace despeckle
