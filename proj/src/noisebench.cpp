#include "salttex/noisebench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "salttex/error.hpp"
#include "salttex/evaluation.hpp"
#include "salttex/parallel.hpp"

namespace salttex {

std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double gaussian_at(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t pair = index / 2;
  constexpr double kUnit = 1.0 / 9007199254740992.0;  // 2^-53
  // u1 in (0, 1] keeps the log finite.
  const double u1 = (static_cast<double>(splitmix64_at(seed, 2 * pair) >> 11) + 1.0) * kUnit;
  const double u2 = static_cast<double>(splitmix64_at(seed, 2 * pair + 1) >> 11) * kUnit;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return index % 2 == 0 ? r * std::cos(theta) : r * std::sin(theta);
}

Section add_gaussian_noise(const Section& s, double sigma, std::uint64_t seed) {
  if (!s.normalized) throw Error(ErrorCode::NotNormalized, "noise is defined on normalized sections");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::InvalidArgument, "sigma must be >= 0");
  Section out = s;
  if (sigma == 0.0) return out;
  auto values = out.data.values();
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = static_cast<float>(values[i] + sigma * gaussian_at(seed, i));
  return out;
}

namespace {

void check_filter_args(double sigma_s, int radius) {
  if (radius < 1) throw Error(ErrorCode::InvalidArgument, "filter radius must be >= 1");
  if (!(sigma_s > 0.0)) throw Error(ErrorCode::InvalidArgument, "spatial sigma must be positive");
}

std::vector<double> spatial_kernel(double sigma_s, int radius) {
  const int side = 2 * radius + 1;
  std::vector<double> k(static_cast<std::size_t>(side * side));
  for (int a = -radius; a <= radius; ++a)
    for (int b = -radius; b <= radius; ++b)
      k[static_cast<std::size_t>((a + radius) * side + b + radius)] =
          std::exp(-(a * a + b * b) / (2.0 * sigma_s * sigma_s));
  return k;
}

}  // namespace

Section bilateral_filter(const Section& s, const BilateralParams& p) {
  check_filter_args(p.sigma_s, p.radius);
  if (!(p.sigma_r > 0.0)) throw Error(ErrorCode::InvalidArgument, "range sigma must be positive");
  const int rows = static_cast<int>(s.rows());
  const int cols = static_cast<int>(s.cols());
  const int side = 2 * p.radius + 1;
  const auto ks = spatial_kernel(p.sigma_s, p.radius);
  const double range_scale = 1.0 / (2.0 * p.sigma_r * p.sigma_r);
  Section out = s;
#pragma omp parallel for schedule(static) num_threads(worker_threads())
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const double center = s.data(r, c);
      double num = 0.0;
      double den = 0.0;
      for (int a = -p.radius; a <= p.radius; ++a) {
        const int rr = std::clamp(r + a, 0, rows - 1);
        for (int b = -p.radius; b <= p.radius; ++b) {
          const int cc = std::clamp(c + b, 0, cols - 1);
          const double v = s.data(rr, cc);
          const double w = ks[static_cast<std::size_t>((a + p.radius) * side + b + p.radius)] *
                           std::exp(-(v - center) * (v - center) * range_scale);
          num += w * v;
          den += w;
        }
      }
      out.data(r, c) = static_cast<float>(num / den);
    }
  return out;
}

Section gaussian_blur(const Section& s, double sigma_s, int radius) {
  check_filter_args(sigma_s, radius);
  const int rows = static_cast<int>(s.rows());
  const int cols = static_cast<int>(s.cols());
  const int side = 2 * radius + 1;
  auto ks = spatial_kernel(sigma_s, radius);
  double total = 0.0;
  for (double w : ks) total += w;
  Section out = s;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int a = -radius; a <= radius; ++a)
        for (int b = -radius; b <= radius; ++b)
          acc += ks[static_cast<std::size_t>((a + radius) * side + b + radius)] *
                 s.data(std::clamp(r + a, 0, rows - 1), std::clamp(c + b, 0, cols - 1));
      out.data(r, c) = static_cast<float>(acc / total);
    }
  return out;
}

std::string_view denoise_name(Denoise d) { return d == Denoise::Bilateral ? "bilateral" : "none"; }

Denoise parse_denoise(std::string_view name) {
  if (name == "none") return Denoise::None;
  if (name == "bilateral") return Denoise::Bilateral;
  throw Error(ErrorCode::InvalidArgument, "unknown denoise mode '" + std::string(name) + "'");
}

void NoiseSweepConfig::validate() const {
  if (sigmas.empty()) throw Error(ErrorCode::InvalidArgument, "noise sweep needs at least one sigma");
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    if (!(sigmas[i] >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise sigmas must be >= 0");
    if (i > 0 && !(sigmas[i] > sigmas[i - 1])) throw Error(ErrorCode::InvalidArgument, "noise sigmas must ascend");
  }
  if (repetitions < 1) throw Error(ErrorCode::InvalidArgument, "repetitions must be >= 1");
  if (denoise == Denoise::Bilateral) {
    check_filter_args(bilateral.sigma_s, bilateral.radius);
    if (!(bilateral.sigma_r > 0.0)) throw Error(ErrorCode::InvalidArgument, "range sigma must be positive");
  }
  detection.validate();
}

SweepReport run_noise_sweep(const Section& s, const Boundary& truth, const NoiseSweepConfig& cfg,
                            const std::vector<AttributeKind>& methods) {
  cfg.validate();
  if (methods.empty()) throw Error(ErrorCode::InvalidArgument, "noise sweep needs at least one method");
  const Section clean = s.normalized ? s : normalize_section(s);

  SweepReport report;
  for (AttributeKind m : methods)
    report.clean_amd.push_back(boundary_metrics(detect(clean, cfg.detection, m).boundary, truth).d_max);

  for (double sigma : cfg.sigmas) {
    // Noisy inputs are shared across methods so they see identical samples.
    std::vector<Section> inputs;
    for (int i = 0; i < cfg.repetitions; ++i) {
      Section noisy = add_gaussian_noise(clean, sigma, cfg.seed + static_cast<std::uint64_t>(i));
      if (cfg.denoise == Denoise::Bilateral) noisy = bilateral_filter(noisy, cfg.bilateral);
      inputs.push_back(std::move(noisy));
    }
    for (AttributeKind m : methods) {
      SweepCell cell;
      cell.sigma = sigma;
      cell.method = m;
      cell.denoise = cfg.denoise;
      std::vector<double> ok;
      for (int i = 0; i < cfg.repetitions; ++i) {
        Repetition rep;
        rep.index = i;
        rep.seed = cfg.seed + static_cast<std::uint64_t>(i);
        try {
          rep.d_max = boundary_metrics(detect(inputs[static_cast<std::size_t>(i)], cfg.detection, m).boundary, truth).d_max;
          ok.push_back(*rep.d_max);
        } catch (const Error& e) {
          rep.error = std::string(e.code_name());
          ++cell.failures;
        }
        cell.reps.push_back(std::move(rep));
      }
      cell.n = ok.size();
      if (!ok.empty()) {
        const Summary sm = summarize(ok);
        cell.mean_amd = sm.mean;
        cell.std_amd = sm.std_dev;
      } else {
        cell.mean_amd = cell.std_amd = std::numeric_limits<double>::quiet_NaN();
      }
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.precision(17);
  return out;
}

}  // namespace

void write_sweep_csv(const SweepReport& r, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "sigma,method,denoise,n,mean_amd,std_amd\n";
  for (const auto& c : r.cells)
    out << c.sigma << ',' << attribute_name(c.method) << ',' << denoise_name(c.denoise) << ',' << c.n << ','
        << c.mean_amd << ',' << c.std_amd << '\n';
}

void write_sweep_detail_csv(const SweepReport& r, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "sigma,method,denoise,repetition,seed,d_max,error\n";
  for (const auto& c : r.cells)
    for (const auto& rep : c.reps) {
      out << c.sigma << ',' << attribute_name(c.method) << ',' << denoise_name(c.denoise) << ',' << rep.index << ','
          << rep.seed << ',';
      if (rep.d_max) out << *rep.d_max;
      out << ',' << rep.error << '\n';
    }
}

}  // namespace salttex
