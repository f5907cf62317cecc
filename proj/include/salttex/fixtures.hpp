#pragma once

#include <cstdint>
#include <vector>

#include "salttex/grid.hpp"
#include "salttex/volume_io.hpp"

namespace salttex {

// Synthetic salt-like sections: horizontally layered sediment (stripes)
// around a chaotic, low-contrast salt body.

/// Stripe texture: 0.5 + 0.5 * sin(2*pi*row/period).
float stripe_value(int row, int period);

/// Uniform chaos texture centred on 0.5 with the given peak-to-peak amplitude.
float chaos_value(std::uint64_t seed, std::uint64_t counter, double amplitude);

struct DiskParams {
  int size = 128;
  double radius = 36.0;
  double center_col = -1.0;  // negative = size / 2
  double center_row = -1.0;
  int stripe_period = 4;
  double chaos_amplitude = 0.2;
  std::uint64_t seed = 7;
};

struct DiskFixture {
  Section section;
  Mask truth_mask;
  Boundary truth;
};

/// Ground truth is the traced contour of the rasterized disk.
Mask disk_mask(int rows, int cols, double center_col, double center_row, double radius);
DiskFixture make_disk_fixture(const DiskParams& p = {});

/// Stripes left of `boundary_col`, uniform noise from it rightwards.
Section make_two_texture_section(int size, int boundary_col, std::uint64_t seed, int stripe_period = 4,
                                 double chaos_amplitude = 0.2);

struct TrackingVolumeParams {
  int sections = 5;
  int size = 128;
  double ref_radius = 34.0;
  double drift = 2.0;  // radius change per section, growing with the section index
  int ref_index = 2;
  int stripe_period = 4;
  double chaos_amplitude = 0.2;
  std::uint64_t seed = 11;
};

struct TrackingVolume {
  SeismicVolume volume;  // inline sections of size x size
  std::vector<Boundary> truth;
  int ref_index = 0;
};

TrackingVolume make_tracking_volume(const TrackingVolumeParams& p = {});

}  // namespace salttex
