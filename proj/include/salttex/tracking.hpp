#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

#include "salttex/attributes.hpp"
#include "salttex/grid.hpp"
#include "salttex/tensor_subspace.hpp"
#include "salttex/volume_io.hpp"

namespace salttex {

enum class FeatureMode { Tensor, Vector };

std::string_view feature_mode_name(FeatureMode mode);
FeatureMode parse_feature_mode(std::string_view name);

struct TrackingConfig {
  int patch_size = 31;
  std::array<int, 3> feature_dims{15, 15, 5};
  double t_e = 2.3;
  int search_halfwidth = 15;
  double lambda_c = 1.0;
  int median_window = 2;
  bool noise_adjusted = false;
  FeatureMode features = FeatureMode::Tensor;
  GotConfig got;

  void validate() const;
};

struct PatchPair {
  Eigen::MatrixXd amp;
  Eigen::MatrixXd got;
  Point center;
};

struct PatchTensors {
  SliceStack amp;
  SliceStack got;
  std::vector<Point> centers;
  std::size_t skipped = 0;
};

bool patch_fits(std::size_t rows, std::size_t cols, Point center, int patch_size);

/// Patch pair centred on `center`; the caller guarantees it fits.
PatchPair extract_patch_pair(const Image& amp, const Image& got, Point center, int patch_size);

/// Stacks the patch pairs of every boundary point whose patch fits, in
/// boundary order. Throws TooFewPatches below max(d3, 2) usable points.
PatchTensors build_patch_tensors(const Section& ref, const AttributeMap& ref_got, const Boundary& b,
                                 const TrackingConfig& cfg);

struct SubspaceModel {
  SourceModel amp;
  SourceModel got;
  int patch_size = 31;
  std::array<int, 3> feature_dims{15, 15, 5};
  double t_e = 2.3;
  bool noise_adjusted = false;
  FeatureMode features = FeatureMode::Tensor;
  std::size_t n_training = 0;
  std::vector<std::string> warnings;
};

SubspaceModel learn_model(const PatchTensors& tensors, const TrackingConfig& cfg);

/// Normalizes the reference section, computes its GoT map and learns.
SubspaceModel build_model(const Section& ref, const Boundary& b, const TrackingConfig& cfg);

/// sqrt(e_amp^2 + e_got^2) of the per-source relative residuals.
double reconstruction_error(const PatchPair& pp, const SubspaceModel& model);

enum class PatchClass { Boundary, NonBoundary };
PatchClass classify(const PatchPair& pp, const SubspaceModel& model);

/// Binary w x w median anchored top-left: a cell is set when at least half of
/// the w*w cells starting at it are set. Cells beyond the frame count as 0.
Mask median_filter_binary(const Mask& m, int window);

/// Points that lie inside at least one window the median filter keeps.
std::vector<Point> median_survivors(const std::vector<Point>& points, std::size_t rows, std::size_t cols,
                                    int window);

struct ReconnectStats {
  std::size_t outliers = 0;
};

/// Angular ordering about the centroid, radial outlier rejection against a
/// circular moving median (window 9, threshold 3 MAD) and linear gap filling
/// into a closed 8-connected chain.
Boundary reconnect(std::vector<Point> points, ReconnectStats* stats = nullptr);

/// Unit normals of a pixel chain from central-difference tangents.
std::vector<std::array<double, 2>> boundary_normals(const Boundary& b);

struct TrackedSection {
  Boundary boundary;
  int section_index = 0;
  std::size_t reference_points = 0;
  std::size_t accepted = 0;
  std::size_t missing = 0;
  std::size_t median_dropped = 0;
  std::size_t outliers = 0;
};

TrackedSection track_section(const SubspaceModel& model, const Boundary& ref, const Section& target,
                             const TrackingConfig& cfg);

/// Same with the target already normalized and its GoT map supplied.
TrackedSection track_section(const SubspaceModel& model, const Boundary& ref, const Section& target_normalized,
                             const AttributeMap& target_got, const TrackingConfig& cfg);

/// One model from the reference section, then every section along `axis`
/// (the reference included) tracked independently from the reference boundary.
std::vector<TrackedSection> track_volume(const SeismicVolume& vol, Axis axis, int ref_index, const Boundary& ref,
                                         const TrackingConfig& cfg);

}  // namespace salttex
