#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "salttex/grid.hpp"

namespace salttex {

enum class Axis { Inline, Crossline };

std::string_view axis_name(Axis axis);
Axis parse_axis(std::string_view name);

/// Post-stack amplitude cube indexed (inline, crossline, time sample).
/// Samples of one trace are contiguous.
struct SeismicVolume {
  std::size_t n_inline = 0;
  std::size_t n_crossline = 0;
  std::size_t n_samples = 0;
  int sample_interval_us = 4000;
  int first_inline = 0;
  int first_crossline = 0;
  int first_time_ms = 0;
  std::vector<float> data;

  SeismicVolume() = default;
  SeismicVolume(std::size_t ni, std::size_t nx, std::size_t ns, float fill = 0.0f)
      : n_inline(ni), n_crossline(nx), n_samples(ns), data(ni * nx * ns, fill) {}

  std::size_t index(std::size_t il, std::size_t xl, std::size_t t) const {
    return (il * n_crossline + xl) * n_samples + t;
  }
  float& at(std::size_t il, std::size_t xl, std::size_t t) { return data[index(il, xl, t)]; }
  float at(std::size_t il, std::size_t xl, std::size_t t) const { return data[index(il, xl, t)]; }

  /// Throws DimMismatch / NonFiniteSample when the invariants do not hold.
  void validate() const;
};

/// 2D slice; rows are time samples, columns the remaining lateral axis.
struct Section {
  Image data;
  Axis axis = Axis::Inline;
  int index = 0;
  bool normalized = false;

  std::size_t rows() const { return data.rows(); }
  std::size_t cols() const { return data.cols(); }
};

/// Ordered pixel chain outlining a salt body.
struct Boundary {
  std::vector<Point> points;
  bool closed = true;
  int section_index = 0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

Section extract_section(const SeismicVolume& vol, Axis axis, int index);

/// Affine min-max rescale to [0,1]. Throws ConstantSection.
Section normalize_section(const Section& s);

/// Same rescale over the whole cube.
SeismicVolume normalize_volume(const SeismicVolume& vol);

/// Wraps a plain image as an un-normalized section.
Section make_section(Image data, Axis axis = Axis::Inline, int index = 0);

// --- SEG-Y (rev1 subset, read only) -------------------------------------

namespace segy {
inline constexpr std::size_t kTextHeaderBytes = 3200;
inline constexpr std::size_t kBinaryHeaderBytes = 400;
inline constexpr std::size_t kTraceHeaderBytes = 240;
// 1-based byte positions, as printed in the SEG-Y standard.
inline constexpr std::size_t kSampleIntervalByte = 3217;
inline constexpr std::size_t kSamplesPerTraceByte = 3221;
inline constexpr std::size_t kFormatCodeByte = 3225;
inline constexpr std::size_t kTraceDelayByte = 109;
inline constexpr std::size_t kTraceSamplesByte = 115;
inline constexpr std::size_t kInlineByte = 189;
inline constexpr std::size_t kCrosslineByte = 193;
}  // namespace segy

/// IBM System/360 single precision to IEEE float (round to nearest;
/// out-of-range magnitudes become +-inf, tiny ones flush toward zero).
float ibm_to_ieee(std::uint32_t ibm);

SeismicVolume read_segy(std::span<const std::byte> bytes);
SeismicVolume read_segy_file(const std::filesystem::path& path);

// --- Raw grid format: <name>.json sidecar + <name>.f32 payload -----------

struct GridFile {
  std::vector<std::size_t> dims;
  std::vector<std::string> axes;
  std::vector<float> values;
};

/// `base` is the path without extension.
GridFile read_grid(const std::filesystem::path& base);
void write_grid(const GridFile& grid, const std::filesystem::path& base);

Section read_section_grid(const std::filesystem::path& base);
SeismicVolume read_volume_grid(const std::filesystem::path& base);
void write_section_grid(const Section& s, const std::filesystem::path& base);
void write_image_grid(const Image& img, const std::filesystem::path& base);
void write_volume_grid(const SeismicVolume& vol, const std::filesystem::path& base);

/// Little-endian f32 encoding used by the grid payload and the HTTP API.
std::string encode_f32le(std::span<const float> values);
std::vector<float> decode_f32le(std::string_view bytes);

// --- Boundary CSV: header "col,row", one ordered point per line ----------

void write_boundary_csv(const Boundary& b, const std::filesystem::path& path);
Boundary read_boundary_csv(const std::filesystem::path& path);

}  // namespace salttex
