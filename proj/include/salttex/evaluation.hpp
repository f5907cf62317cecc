#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "salttex/volume_io.hpp"

namespace salttex {

struct BoundaryMetrics {
  double d_max = 0.0;          // Hausdorff distance over the vertex sets
  double mean_sym_dist = 0.0;  // mean of both directed mean nearest-point distances
  std::size_t n_points_a = 0;
  std::size_t n_points_b = 0;
};

BoundaryMetrics boundary_metrics(const Boundary& a, const Boundary& b);

/// Mean of the per-pair Hausdorff distances.
double amd(std::span<const Boundary> a, std::span<const Boundary> b);

struct Summary {
  double mean = 0.0;
  double std_dev = 0.0;  // population
  std::size_t n = 0;
};

Summary summarize(std::span<const double> values);

struct SectionScore {
  int index = 0;
  BoundaryMetrics metrics;
};

/// "index,d_max,mean_sym_dist" rows.
void write_metrics_csv(std::span<const SectionScore> rows, const std::filesystem::path& path);

/// Summary JSON: per-section rows plus mean / std of d_max and mean_sym_dist and the AMD.
std::string metrics_summary_json(std::span<const SectionScore> rows, const std::string& label);

}  // namespace salttex
