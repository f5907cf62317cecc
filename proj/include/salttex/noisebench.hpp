#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "salttex/attributes.hpp"
#include "salttex/segmentation.hpp"
#include "salttex/volume_io.hpp"

namespace salttex {

/// Output `counter` of a SplitMix64 stream started at `seed`.
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t counter);

/// Standard normal deviate number `index` (Box-Muller over counter pairs).
double gaussian_at(std::uint64_t seed, std::uint64_t index);

/// Adds N(0, sigma^2) per pixel, row-major pixel order as the counter. No
/// clipping. Throws NotNormalized unless the section is flagged normalized.
Section add_gaussian_noise(const Section& s, double sigma, std::uint64_t seed);

struct BilateralParams {
  double sigma_s = 1.5;
  double sigma_r = 0.1;
  int radius = 3;
};

Section bilateral_filter(const Section& s, const BilateralParams& p);

/// Normalized Gaussian convolution, replicate padding.
Section gaussian_blur(const Section& s, double sigma_s, int radius);

enum class Denoise { None, Bilateral };
std::string_view denoise_name(Denoise d);
Denoise parse_denoise(std::string_view name);

struct NoiseSweepConfig {
  std::vector<double> sigmas{0.01, 0.02, 0.03, 0.04, 0.05};
  std::uint64_t seed = 1;
  int repetitions = 10;
  Denoise denoise = Denoise::None;
  BilateralParams bilateral;
  DetectionConfig detection;

  void validate() const;
};

struct Repetition {
  int index = 0;
  std::uint64_t seed = 0;
  std::optional<double> d_max;  // empty when detection failed
  std::string error;
};

struct SweepCell {
  double sigma = 0.0;
  AttributeKind method = AttributeKind::Got;
  Denoise denoise = Denoise::None;
  std::size_t n = 0;         // successful repetitions
  std::size_t failures = 0;  // detections that threw
  double mean_amd = 0.0;
  double std_amd = 0.0;
  std::vector<Repetition> reps;
};

struct SweepReport {
  std::vector<SweepCell> cells;  // sigma-major, then method order
  std::vector<double> clean_amd;  // per method
};

/// Per sigma and method: `repetitions` noisy copies (seeds seed+i), optional
/// bilateral denoising, detection and d_max against `truth`.
SweepReport run_noise_sweep(const Section& s, const Boundary& truth, const NoiseSweepConfig& cfg,
                            const std::vector<AttributeKind>& methods);

/// "sigma,method,denoise,n,mean_amd,std_amd".
void write_sweep_csv(const SweepReport& r, const std::filesystem::path& path);
/// One line per repetition: "sigma,method,denoise,repetition,seed,d_max,error".
void write_sweep_detail_csv(const SweepReport& r, const std::filesystem::path& path);

}  // namespace salttex
