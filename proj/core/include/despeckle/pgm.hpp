#pragma once

#include "despeckle/image.hpp"

#include <filesystem>
#include <vector>

namespace despeckle {

/// Reads a binary (P5) graymap with 8- or 16-bit samples, scaled to [0, 1].
Image read_pgm(const std::filesystem::path& path);

/// Writes a 16-bit binary graymap.
void write_pgm16(const std::filesystem::path& path, const Image& image);

/// All *.pgm files of a directory, sorted by filename (acquisition order).
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

ImageStack read_stack(const std::filesystem::path& dir);

}  // namespace despeckle
