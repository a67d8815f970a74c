#include "despeckle/pgm.hpp"
#include "despeckle/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>

namespace despeckle {

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
long read_header_value(std::istream& in, const std::filesystem::path& path) {
  std::string token;
  while (in >> token) {
    if (token.front() == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    try {
      std::size_t used = 0;
      const long v = std::stol(token, &used);
      if (used == token.size()) return v;
    } catch (const std::exception&) {
    }
    break;
  }
  fail(ErrorKind::Io, "malformed PGM header in " + path.string());
}

}  // namespace

Image read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P5") fail(ErrorKind::Io, path.string() + " is not a binary PGM (P5)");
  const long width = read_header_value(in, path);
  const long height = read_header_value(in, path);
  const long maxval = read_header_value(in, path);
  if (width < 1 || height < 1 || maxval < 1 || maxval > 65535)
    fail(ErrorKind::Io, "unsupported PGM geometry or maxval in " + path.string());
  in.get();  // single whitespace before the raster

  const bool wide = maxval > 255;
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<unsigned char> raw(count * (wide ? 2 : 1));
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size()))
    fail(ErrorKind::Io, "truncated PGM raster in " + path.string());

  Matrix px(height, width);
  const double scale = 1.0 / static_cast<double>(maxval);
  for (long y = 0; y < height; ++y) {
    for (long x = 0; x < width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y * width + x);
      const unsigned v = wide ? (unsigned{raw[2 * i]} << 8) | raw[2 * i + 1] : raw[i];
      px(y, x) = std::min(1.0, static_cast<double>(v) * scale);
    }
  }
  return Image(std::move(px));
}

void write_pgm16(const std::filesystem::path& path, const Image& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << "P5\n" << image.width() << ' ' << image.height() << "\n65535\n";
  std::vector<unsigned char> raw(static_cast<std::size_t>(image.size()) * 2);
  std::size_t i = 0;
  for (Eigen::Index y = 0; y < image.height(); ++y) {
    for (Eigen::Index x = 0; x < image.width(); ++x) {
      const auto v = static_cast<unsigned>(std::lround(image.pixels()(y, x) * 65535.0));
      raw[i++] = static_cast<unsigned char>(v >> 8);
      raw[i++] = static_cast<unsigned char>(v & 0xFF);
    }
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) fail(ErrorKind::Io, "failed writing " + path.string());
}

std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
    fail(ErrorKind::Io, dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".pgm")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
  return files;
}

ImageStack read_stack(const std::filesystem::path& dir) {
  ImageStack stack;
  for (const auto& f : list_frames(dir)) stack.push_back(read_pgm(f));
  if (stack.empty()) fail(ErrorKind::Io, "no .pgm frames in " + dir.string());
  validate_stack(stack);
  return stack;
}

}  // namespace despeckle
