#include <bit>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>

#include <json.hpp>

#include "salttex/error.hpp"
#include "salttex/volume_io.hpp"

namespace salttex {
namespace {

using nlohmann::json;

std::filesystem::path with_ext(const std::filesystem::path& base, const char* ext) {
  auto p = base;
  p += ext;
  return p;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

json read_sidecar(const std::filesystem::path& base) {
  const std::string text = slurp(with_ext(base, ".json"));
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadSidecar, with_ext(base, ".json").string() + ": " + e.what());
  }
}

}  // namespace

std::string encode_f32le(std::span<const float> values) {
  std::string out(values.size() * 4, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(values[i]);
    out[4 * i + 0] = static_cast<char>(bits & 0xff);
    out[4 * i + 1] = static_cast<char>((bits >> 8) & 0xff);
    out[4 * i + 2] = static_cast<char>((bits >> 16) & 0xff);
    out[4 * i + 3] = static_cast<char>((bits >> 24) & 0xff);
  }
  return out;
}

std::vector<float> decode_f32le(std::string_view bytes) {
  if (bytes.size() % 4 != 0) throw Error(ErrorCode::DimMismatch, "payload length is not a multiple of 4");
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto b = [&](std::size_t k) { return static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 * i + k])); };
    out[i] = std::bit_cast<float>(b(0) | (b(1) << 8) | (b(2) << 16) | (b(3) << 24));
  }
  return out;
}

GridFile read_grid(const std::filesystem::path& base) {
  const json meta = read_sidecar(base);
  GridFile g;
  try {
    if (meta.at("dtype").get<std::string>() != "f32le")
      throw Error(ErrorCode::BadSidecar, "dtype must be \"f32le\"");
    if (meta.at("order").get<std::string>() != "row-major")
      throw Error(ErrorCode::BadSidecar, "order must be \"row-major\"");
    g.dims = meta.at("dims").get<std::vector<std::size_t>>();
    if (meta.contains("axes")) g.axes = meta.at("axes").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadSidecar, with_ext(base, ".json").string() + ": " + e.what());
  }
  if (g.dims.empty()) throw Error(ErrorCode::BadSidecar, "dims must not be empty");
  if (!g.axes.empty() && g.axes.size() != g.dims.size())
    throw Error(ErrorCode::BadSidecar, "axes and dims have different lengths");
  const std::size_t expected =
      std::accumulate(g.dims.begin(), g.dims.end(), std::size_t{1}, std::multiplies<>());
  const std::string payload = slurp(with_ext(base, ".f32"));
  if (payload.size() != expected * 4)
    throw Error(ErrorCode::DimMismatch, "payload holds " + std::to_string(payload.size()) + " bytes, dims need " +
                                            std::to_string(expected * 4));
  g.values = decode_f32le(payload);
  return g;
}

void write_grid(const GridFile& grid, const std::filesystem::path& base) {
  const std::size_t expected =
      std::accumulate(grid.dims.begin(), grid.dims.end(), std::size_t{1}, std::multiplies<>());
  if (grid.dims.empty() || expected != grid.values.size())
    throw Error(ErrorCode::DimMismatch, "grid values do not match dims");
  json meta = {{"dims", grid.dims}, {"dtype", "f32le"}, {"order", "row-major"}};
  if (!grid.axes.empty()) meta["axes"] = grid.axes;
  if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
  dump(with_ext(base, ".json"), meta.dump(2) + "\n");
  dump(with_ext(base, ".f32"), encode_f32le(grid.values));
}

Section read_section_grid(const std::filesystem::path& base) {
  GridFile g = read_grid(base);
  if (g.dims.size() != 2) throw Error(ErrorCode::DimMismatch, "expected a 2D grid, got " + std::to_string(g.dims.size()) + "D");
  for (float v : g.values)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteSample, "grid contains NaN or Inf");
  Section s;
  s.data = Image(g.dims[0], g.dims[1]);
  std::copy(g.values.begin(), g.values.end(), s.data.values().begin());
  return s;
}

SeismicVolume read_volume_grid(const std::filesystem::path& base) {
  GridFile g = read_grid(base);
  if (g.dims.size() != 3) throw Error(ErrorCode::DimMismatch, "expected a 3D grid, got " + std::to_string(g.dims.size()) + "D");
  SeismicVolume vol;
  vol.n_inline = g.dims[0];
  vol.n_crossline = g.dims[1];
  vol.n_samples = g.dims[2];
  vol.data = std::move(g.values);
  vol.validate();
  return vol;
}

void write_image_grid(const Image& img, const std::filesystem::path& base) {
  write_grid({{img.rows(), img.cols()}, {"time", "trace"}, img.storage()}, base);
}

void write_section_grid(const Section& s, const std::filesystem::path& base) { write_image_grid(s.data, base); }

void write_volume_grid(const SeismicVolume& vol, const std::filesystem::path& base) {
  write_grid({{vol.n_inline, vol.n_crossline, vol.n_samples}, {"inline", "crossline", "time"}, vol.data}, base);
}

}  // namespace salttex
