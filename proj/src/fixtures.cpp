#include "salttex/fixtures.hpp"

#include <cmath>
#include <numbers>

#include "salttex/error.hpp"
#include "salttex/noisebench.hpp"
#include "salttex/segmentation.hpp"

namespace salttex {

float stripe_value(int row, int period) {
  return static_cast<float>(0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * row / period));
}

float chaos_value(std::uint64_t seed, std::uint64_t counter, double amplitude) {
  const double u = static_cast<double>(splitmix64_at(seed, counter) >> 11) / 9007199254740992.0;
  return static_cast<float>(0.5 + amplitude * (u - 0.5));
}

Mask disk_mask(int rows, int cols, double center_col, double center_row, double radius) {
  Mask m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), 0);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const double dc = c - center_col;
      const double dr = r - center_row;
      if (dc * dc + dr * dr <= radius * radius) m(r, c) = 1;
    }
  return m;
}

namespace {

Image textured(const Mask& inside, int period, double amplitude, std::uint64_t seed) {
  Image img(inside.rows(), inside.cols());
  for (std::size_t r = 0; r < img.rows(); ++r)
    for (std::size_t c = 0; c < img.cols(); ++c)
      img(r, c) = inside(r, c) != 0 ? chaos_value(seed, r * img.cols() + c, amplitude)
                                    : stripe_value(static_cast<int>(r), period);
  return img;
}

}  // namespace

DiskFixture make_disk_fixture(const DiskParams& p) {
  if (p.size < 23) throw Error(ErrorCode::InvalidArgument, "fixture size must be >= 23");
  if (!(p.radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "disk radius must be positive");
  const double cc = p.center_col < 0 ? p.size / 2.0 : p.center_col;
  const double cr = p.center_row < 0 ? p.size / 2.0 : p.center_row;
  DiskFixture f;
  f.truth_mask = disk_mask(p.size, p.size, cc, cr, p.radius);
  f.section = make_section(textured(f.truth_mask, p.stripe_period, p.chaos_amplitude, p.seed));
  f.truth = trace_boundary(f.truth_mask);
  return f;
}

Section make_two_texture_section(int size, int boundary_col, std::uint64_t seed, int stripe_period,
                                 double chaos_amplitude) {
  Image img(static_cast<std::size_t>(size), static_cast<std::size_t>(size));
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c)
      img(r, c) = c < boundary_col ? stripe_value(r, stripe_period)
                                   : chaos_value(seed, static_cast<std::uint64_t>(r * size + c), chaos_amplitude);
  return make_section(std::move(img));
}

TrackingVolume make_tracking_volume(const TrackingVolumeParams& p) {
  if (p.sections < 1 || p.ref_index < 0 || p.ref_index >= p.sections)
    throw Error(ErrorCode::InvalidArgument, "reference index must lie within the volume");
  TrackingVolume tv;
  tv.ref_index = p.ref_index;
  const auto n = static_cast<std::size_t>(p.size);
  tv.volume = SeismicVolume(static_cast<std::size_t>(p.sections), n, n);
  for (int k = 0; k < p.sections; ++k) {
    const double radius = p.ref_radius + p.drift * (k - p.ref_index);
    const Mask m = disk_mask(p.size, p.size, p.size / 2.0, p.size / 2.0, radius);
    const Image img = textured(m, p.stripe_period, p.chaos_amplitude, p.seed + static_cast<std::uint64_t>(k));
    // Section rows are time samples, columns crosslines.
    for (std::size_t t = 0; t < n; ++t)
      for (std::size_t x = 0; x < n; ++x) tv.volume.at(static_cast<std::size_t>(k), x, t) = img(t, x);
    Boundary b = trace_boundary(m);
    b.section_index = k;
    tv.truth.push_back(std::move(b));
  }
  return tv;
}

}  // namespace salttex
