#include "salttex/png_export.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

#include "salttex/error.hpp"

namespace salttex {
namespace {

void append_bytes(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), length);
}

void no_flush(png_structp) {}

}  // namespace

std::string encode_png(const Image& img) {
  if (img.empty()) throw Error(ErrorCode::EmptyInput, "cannot encode an empty image");
  auto [lo_it, hi_it] = std::minmax_element(img.values().begin(), img.values().end());
  const double lo = *lo_it;
  const double span = static_cast<double>(*hi_it) - lo;

  std::vector<png_byte> pixels(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double t = span > 0 ? (img.values()[i] - lo) / span : 0.0;
    pixels[i] = static_cast<png_byte>(std::lround(255.0 * std::clamp(t, 0.0, 1.0)));
  }

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw Error(ErrorCode::IoError, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  std::string out;
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::IoError, "PNG encoding failed");
  }
  png_set_write_fn(png, &out, append_bytes, no_flush);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.cols()), static_cast<png_uint_32>(img.rows()), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t r = 0; r < img.rows(); ++r) png_write_row(png, pixels.data() + r * img.cols());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

void write_png(const Image& img, const std::filesystem::path& path) {
  const std::string bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace salttex
