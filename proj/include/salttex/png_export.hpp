#pragma once

#include <filesystem>
#include <string>

#include "salttex/grid.hpp"

namespace salttex {

/// 8-bit grayscale PNG for viewing only: value v maps to
/// round(255 * (v - min) / (max - min)); a constant image maps to 0.
std::string encode_png(const Image& img);
void write_png(const Image& img, const std::filesystem::path& path);

}  // namespace salttex
