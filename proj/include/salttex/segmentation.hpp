#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "salttex/attributes.hpp"
#include "salttex/grid.hpp"
#include "salttex/volume_io.hpp"

namespace salttex {

enum class ThresholdMode { Otsu, Manual };
enum class SeedMode { Auto, Manual };

struct DetectionConfig {
  ThresholdMode threshold_mode = ThresholdMode::Otsu;
  std::optional<double> t_g;
  SeedMode seed_mode = SeedMode::Auto;
  std::optional<Point> seed;
  double smoothing_sigma = 1.0;
  int morph_radius = 1;
  GotConfig got;
  GlcmConfig glcm;

  /// Setting a value switches the corresponding mode to manual.
  DetectionConfig& with_threshold(double t);
  DetectionConfig& with_seed(Point p);
  void validate() const;
};

/// Otsu split of a histogram: class 1 = bins [0, T-1], class 2 = [T, N-1].
/// Maximizes w1*w2*(mu1-mu2)^2; ties go to the smallest T.
int otsu_threshold(std::span<const double> histogram);

/// 256-bin histogram over [min, max] of the map's interior values.
std::vector<double> interior_histogram(const AttributeMap& map, int bins = 256);

/// Otsu threshold as an attribute value: min + T * (max - min) / bins.
double otsu_threshold_value(const AttributeMap& map, int bins = 256);

/// Normalized (2*half+1)^2 Gaussian smoothing of the map's interior,
/// padding by replicating the nearest interior value.
Grid2<double> smooth_interior(const AttributeMap& map, double sigma, int half);

/// Argmin of the smoothed map over points at least `exclude_margin` from
/// every edge (defaults to the map's own margin); row-major tie-break.
Point select_seed(const AttributeMap& d_map, double sigma, int half = 5, int exclude_margin = -1);

/// 4-connected component of {p in interior : g[p] < t_g} containing the seed.
Mask region_grow(const AttributeMap& g_map, Point seed, double t_g);

/// Closing with a (2r+1)^2 square (pixels outside the frame count as
/// background for dilation and foreground for erosion), then hole filling.
Mask enhance_mask(const Mask& m, int radius);

Mask dilate(const Mask& m, int radius);
Mask erode(const Mask& m, int radius);
Mask fill_holes(const Mask& m);

/// Label of the largest 4-connected component (first in raster order on ties).
Mask largest_component(const Mask& m);

/// Moore-neighbour trace of the largest component's outer contour, clockwise
/// from its first pixel in raster order.
Boundary trace_boundary(const Mask& m);

struct DetectionResult {
  Boundary boundary;
  Mask mask;
  AttributeMap attribute;
  Point seed;
  double threshold = 0.0;
  std::map<std::string, double> timings_ms;
};

/// Attribute map of a section, normalizing it first when needed.
AttributeMap compute_attribute(const Section& s, AttributeKind kind, const DetectionConfig& cfg = {});

/// Full pipeline on one section. For the gradient attribute only the
/// in-plane Sobel partials are available here.
DetectionResult detect(const Section& s, const DetectionConfig& cfg, AttributeKind attr = AttributeKind::Got);

/// Same, on a section of a volume; the gradient attribute then uses the full
/// 3D Sobel operator on the min-max normalized volume.
DetectionResult detect(const SeismicVolume& vol, Axis axis, int index, const DetectionConfig& cfg,
                       AttributeKind attr = AttributeKind::Got);

/// Seeding, thresholding, growing and tracing on precomputed maps. `d_map`
/// is only consulted in auto seed mode.
DetectionResult detect_on_maps(const AttributeMap& attr, const AttributeMap* d_map, const DetectionConfig& cfg);

}  // namespace salttex
