#pragma once

#include <string_view>
#include <vector>

#include "salttex/grid.hpp"
#include "salttex/volume_io.hpp"

namespace salttex {

enum class AttributeKind { Got, Directionality, GlcmContrast, Gradient };

std::string_view attribute_name(AttributeKind kind);
AttributeKind parse_attribute(std::string_view name);

/// Non-negative per-pixel attribute co-registered with its section.
/// Pixels closer than `border_margin` to any edge hold 0.
struct AttributeMap {
  Image data;
  AttributeKind kind = AttributeKind::Got;
  int border_margin = 0;

  bool in_interior(int row, int col) const {
    return row >= border_margin && col >= border_margin &&
           row < static_cast<int>(data.rows()) - border_margin && col < static_cast<int>(data.cols()) - border_margin;
  }
};

/// Window half-sizes n (window side 2n+1) and their weights.
struct GotConfig {
  std::vector<int> scales{1, 2, 3, 4, 5};
  std::vector<double> weights{1.0, 1.0 / 2, 1.0 / 3, 1.0 / 4, 1.0 / 5};

  /// Scales 1..N with w_n = 1/n.
  static GotConfig with_scales(std::vector<int> scales);
  void validate() const;
  int max_scale() const { return scales.back(); }
  int border_margin() const { return 2 * max_scale() + 1; }
};

// --- dissimilarity ------------------------------------------------------

/// Mean magnitude of the 2D DFT of the magnitude of the 2D DFT of |a - b|
/// (unnormalized forward transforms, mean over every outer coefficient).
double dissimilarity(const Grid2<double>& w_minus, const Grid2<double>& w_plus);

/// Same measure evaluated on an already-formed side x side block of |a - b|
/// (row-major). Reuses cached per-size transform plans.
double dissimilarity_of_difference(std::span<const double> abs_diff, int side);

// --- GoT ----------------------------------------------------------------

struct GotComponents {
  AttributeMap gx;
  AttributeMap gy;
  AttributeMap g;
};

GotComponents got_components(const Section& s, const GotConfig& cfg = {});
AttributeMap got_map(const Section& s, const GotConfig& cfg = {});

// --- directionality -----------------------------------------------------

/// Sum over scales of 1 - min/max eigenvalue of the inertia tensor of the
/// intensity-gradient scatter in each (2n+1)^2 window. A window without any
/// gradient variation contributes 0.
AttributeMap directionality_map(const Section& s, const std::vector<int>& scales = {1, 2, 3, 4, 5});

/// Per-window term for one scale, exposed for testing.
double directionality_term(const Grid2<double>& window);

// --- GLCM contrast ------------------------------------------------------

struct GlcmConfig {
  int r_d = 4;
  int n_levels = 16;
};

/// Global min-max quantization into n_levels gray levels.
Grid2<int> quantize_levels(const Image& img, int n_levels);

AttributeMap glcm_contrast_map(const Section& s, const GlcmConfig& cfg = {});

// --- Sobel gradients ----------------------------------------------------

/// |grad| of the volume with separable 3x3x3 Sobel kernels; boundary
/// planes are 0. Result shares the volume's geometry.
SeismicVolume sobel3d_gradient(const SeismicVolume& vol);

/// 2D restriction (depth/trace partials only) on a single section.
AttributeMap sobel2d_gradient(const Section& s);

/// Slice of a 3D gradient field as an attribute map.
AttributeMap gradient_map_from_volume(const SeismicVolume& grad, Axis axis, int index);

}  // namespace salttex
