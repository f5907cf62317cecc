#include "salttex/attributes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "salttex/error.hpp"
#include "salttex/parallel.hpp"

namespace salttex {
namespace {

Grid2<double> to_double(const Image& img) {
  Grid2<double> out(img.rows(), img.cols());
  for (std::size_t i = 0; i < img.size(); ++i) out.values()[i] = img.values()[i];
  return out;
}

void require_size(const Section& s, int margin, const char* what) {
  const auto need = static_cast<std::size_t>(2 * margin + 1);
  if (s.rows() < need || s.cols() < need)
    throw Error(ErrorCode::SectionTooSmall, std::string(what) + " needs at least " + std::to_string(need) + "x" +
                                                std::to_string(need) + " samples, section is " +
                                                std::to_string(s.rows()) + "x" + std::to_string(s.cols()));
}

AttributeMap blank_map(const Section& s, AttributeKind kind, int margin) {
  AttributeMap m;
  m.data = Image(s.rows(), s.cols(), 0.0f);
  m.kind = kind;
  m.border_margin = margin;
  return m;
}

// Inertia-tensor directionality of one window given by an accessor (a, b) -> value.
template <typename Access>
double directionality_of(Access&& w, int side) {
  const int m = side;
  const auto n = static_cast<double>(m * m);
  thread_local std::vector<double> dx;
  thread_local std::vector<double> dy;
  dx.resize(static_cast<std::size_t>(m * m));
  dy.resize(static_cast<std::size_t>(m * m));
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      const double gx = 0.5 * (w(a, std::min(b + 1, m - 1)) - w(a, std::max(b - 1, 0)));
      const double gy = 0.5 * (w(std::min(a + 1, m - 1), b) - w(std::max(a - 1, 0), b));
      dx[static_cast<std::size_t>(a * m + b)] = gx;
      dy[static_cast<std::size_t>(a * m + b)] = gy;
      mean_x += gx;
      mean_y += gy;
    }
  }
  mean_x /= n;
  mean_y /= n;
  double ixx = 0.0;
  double iyy = 0.0;
  double ixy = 0.0;
  for (std::size_t k = 0; k < dx.size(); ++k) {
    const double ex = dx[k] - mean_x;
    const double ey = dy[k] - mean_y;
    ixx += ey * ey;
    iyy += ex * ex;
    ixy -= ex * ey;
  }
  const double half_trace = 0.5 * (ixx + iyy);
  const double half_gap = 0.5 * (ixx - iyy);
  const double disc = std::sqrt(half_gap * half_gap + ixy * ixy);
  const double lmax = half_trace + disc;
  const double lmin = std::max(0.0, half_trace - disc);
  if (!(lmax > 0.0)) return 0.0;
  return 1.0 - lmin / lmax;
}

}  // namespace

std::string_view attribute_name(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::Got: return "got";
    case AttributeKind::Directionality: return "directionality";
    case AttributeKind::GlcmContrast: return "glcm";
    case AttributeKind::Gradient: return "gradient";
  }
  return "unknown";
}

AttributeKind parse_attribute(std::string_view name) {
  if (name == "got") return AttributeKind::Got;
  if (name == "directionality") return AttributeKind::Directionality;
  if (name == "glcm" || name == "glcm_contrast") return AttributeKind::GlcmContrast;
  if (name == "gradient") return AttributeKind::Gradient;
  throw Error(ErrorCode::InvalidArgument, "unknown attribute '" + std::string(name) + "'");
}

GotConfig GotConfig::with_scales(std::vector<int> scales) {
  GotConfig cfg;
  cfg.scales = std::move(scales);
  cfg.weights.clear();
  for (int n : cfg.scales) cfg.weights.push_back(1.0 / n);
  return cfg;
}

void GotConfig::validate() const {
  if (scales.empty()) throw Error(ErrorCode::InvalidArgument, "GoT needs at least one scale");
  if (scales.size() != weights.size()) throw Error(ErrorCode::InvalidArgument, "GoT scales and weights differ in length");
  for (std::size_t k = 0; k < scales.size(); ++k) {
    if (scales[k] < 1) throw Error(ErrorCode::InvalidArgument, "GoT scales must be >= 1");
    if (k > 0 && scales[k] <= scales[k - 1])
      throw Error(ErrorCode::InvalidArgument, "GoT scales must be strictly increasing");
    if (!(weights[k] > 0.0)) throw Error(ErrorCode::InvalidArgument, "GoT weights must be positive");
  }
}

GotComponents got_components(const Section& s, const GotConfig& cfg) {
  cfg.validate();
  const int margin = cfg.border_margin();
  require_size(s, margin, "GoT");
  const Grid2<double> img = to_double(s.data);
  GotComponents out{blank_map(s, AttributeKind::Got, margin), blank_map(s, AttributeKind::Got, margin),
                    blank_map(s, AttributeKind::Got, margin)};
  const int rows = static_cast<int>(s.rows());
  const int cols = static_cast<int>(s.cols());

#pragma omp parallel for schedule(dynamic) num_threads(worker_threads())
  for (int i = margin; i < rows - margin; ++i) {
    std::vector<double> diff;
    for (int j = margin; j < cols - margin; ++j) {
      double gx = 0.0;
      double gy = 0.0;
      for (std::size_t k = 0; k < cfg.scales.size(); ++k) {
        const int n = cfg.scales[k];
        const int side = 2 * n + 1;
        diff.resize(static_cast<std::size_t>(side * side));
        // Horizontal pair: W- ends on column j, W+ starts at j+1; rows centered on i.
        for (int a = 0; a < side; ++a)
          for (int b = 0; b < side; ++b)
            diff[static_cast<std::size_t>(a * side + b)] =
                std::abs(img(i - n + a, j - 2 * n + b) - img(i - n + a, j + 1 + b));
        gx += cfg.weights[k] * dissimilarity_of_difference(diff, side);
        // Vertical pair: W- ends on row i, W+ starts at i+1; columns centered on j.
        for (int a = 0; a < side; ++a)
          for (int b = 0; b < side; ++b)
            diff[static_cast<std::size_t>(a * side + b)] =
                std::abs(img(i - 2 * n + a, j - n + b) - img(i + 1 + a, j - n + b));
        gy += cfg.weights[k] * dissimilarity_of_difference(diff, side);
      }
      out.gx.data(i, j) = static_cast<float>(gx);
      out.gy.data(i, j) = static_cast<float>(gy);
      out.g.data(i, j) = static_cast<float>(std::sqrt(gx * gx + gy * gy));
    }
  }
  return out;
}

AttributeMap got_map(const Section& s, const GotConfig& cfg) { return got_components(s, cfg).g; }

double directionality_term(const Grid2<double>& window) {
  if (window.rows() != window.cols() || window.empty())
    throw Error(ErrorCode::ShapeMismatch, "directionality window must be square");
  return directionality_of([&](int a, int b) { return window(a, b); }, static_cast<int>(window.rows()));
}

AttributeMap directionality_map(const Section& s, const std::vector<int>& scales) {
  if (scales.empty()) throw Error(ErrorCode::InvalidArgument, "directionality needs at least one scale");
  for (int n : scales)
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "directionality scales must be >= 1");
  const int margin = *std::max_element(scales.begin(), scales.end());
  require_size(s, margin, "directionality");
  const Grid2<double> img = to_double(s.data);
  AttributeMap out = blank_map(s, AttributeKind::Directionality, margin);
  const int rows = static_cast<int>(s.rows());
  const int cols = static_cast<int>(s.cols());

#pragma omp parallel for schedule(dynamic) num_threads(worker_threads())
  for (int i = margin; i < rows - margin; ++i) {
    for (int j = margin; j < cols - margin; ++j) {
      double total = 0.0;
      for (int n : scales) {
        total += directionality_of([&](int a, int b) { return img(i - n + a, j - n + b); }, 2 * n + 1);
      }
      out.data(i, j) = static_cast<float>(total);
    }
  }
  return out;
}

Grid2<int> quantize_levels(const Image& img, int n_levels) {
  if (n_levels < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 gray levels");
  Grid2<int> q(img.rows(), img.cols(), 0);
  if (img.empty()) return q;
  auto [lo_it, hi_it] = std::minmax_element(img.values().begin(), img.values().end());
  const double lo = *lo_it;
  const double span = static_cast<double>(*hi_it) - lo;
  if (!(span > 0)) return q;
  for (std::size_t k = 0; k < img.size(); ++k) {
    const double t = (img.values()[k] - lo) / span;
    q.values()[k] = std::min(n_levels - 1, static_cast<int>(std::floor(t * n_levels)));
  }
  return q;
}

AttributeMap glcm_contrast_map(const Section& s, const GlcmConfig& cfg) {
  if (cfg.r_d < 1) throw Error(ErrorCode::InvalidArgument, "GLCM window radius must be >= 1");
  const int R = cfg.r_d;
  require_size(s, R, "GLCM contrast");
  const Grid2<int> q = quantize_levels(s.data, cfg.n_levels);
  AttributeMap out = blank_map(s, AttributeKind::GlcmContrast, R);
  const int rows = static_cast<int>(s.rows());
  const int cols = static_cast<int>(s.cols());
  constexpr int kDirections[4][2] = {{0, 1}, {1, 0}, {1, 1}, {1, -1}};
  const double n_offsets = 4.0 * R;

#pragma omp parallel for schedule(dynamic) num_threads(worker_threads())
  for (int i = R; i < rows - R; ++i) {
    for (int j = R; j < cols - R; ++j) {
      double value = 0.0;
      for (const auto& dir : kDirections) {
        for (int d = 1; d <= R; ++d) {
          const int dr = dir[0] * d;
          const int dc = dir[1] * d;
          std::int64_t weighted = 0;
          std::int64_t pairs = 0;
          for (int r = i - R; r <= i + R; ++r) {
            const int r2 = r + dr;
            if (r2 > i + R) continue;
            for (int c = j - R; c <= j + R; ++c) {
              const int c2 = c + dc;
              if (c2 < j - R || c2 > j + R) continue;
              const int diff = q(r, c) - q(r2, c2);
              weighted += diff * diff;
              ++pairs;
            }
          }
          // Symmetric accumulation doubles both sums; the ratio is unchanged.
          value += (static_cast<double>(weighted) / static_cast<double>(pairs)) / n_offsets;
        }
      }
      out.data(i, j) = static_cast<float>(value);
    }
  }
  return out;
}

SeismicVolume sobel3d_gradient(const SeismicVolume& vol) {
  if (vol.n_inline < 3 || vol.n_crossline < 3 || vol.n_samples < 3)
    throw Error(ErrorCode::VolumeTooSmall, "3D Sobel needs every dimension >= 3");
  const std::size_t NI = vol.n_inline;
  const std::size_t NX = vol.n_crossline;
  const std::size_t NT = vol.n_samples;
  const std::size_t total = vol.data.size();
  auto idx = [&](std::size_t il, std::size_t xl, std::size_t t) { return (il * NX + xl) * NT + t; };

  // Separable passes: [1,2,1] smoothing or [-1,0,1] derivative along one axis,
  // valid wherever the stencil fits; the boundary planes are discarded anyway.
  enum class Tap { Smooth, Derive };
  auto pass = [&](const std::vector<double>& src, int axis, Tap tap) {
    std::vector<double> dst(total, 0.0);
    const std::size_t stride = axis == 0 ? NX * NT : axis == 1 ? NT : 1;
    const std::size_t extent = axis == 0 ? NI : axis == 1 ? NX : NT;
    for (std::size_t il = 0; il < NI; ++il)
      for (std::size_t xl = 0; xl < NX; ++xl)
        for (std::size_t t = 0; t < NT; ++t) {
          const std::size_t pos = axis == 0 ? il : axis == 1 ? xl : t;
          if (pos == 0 || pos + 1 == extent) continue;
          const std::size_t k = idx(il, xl, t);
          dst[k] = tap == Tap::Smooth ? src[k - stride] + 2.0 * src[k] + src[k + stride]
                                      : src[k + stride] - src[k - stride];
        }
    return dst;
  };

  const std::vector<double> v(vol.data.begin(), vol.data.end());
  // axis 0 = inline (z), 1 = crossline (x), 2 = time (y)
  const auto fx = pass(pass(pass(v, 1, Tap::Derive), 0, Tap::Smooth), 2, Tap::Smooth);
  const auto fy = pass(pass(pass(v, 2, Tap::Derive), 0, Tap::Smooth), 1, Tap::Smooth);
  const auto fz = pass(pass(pass(v, 0, Tap::Derive), 1, Tap::Smooth), 2, Tap::Smooth);

  SeismicVolume out = vol;
  std::fill(out.data.begin(), out.data.end(), 0.0f);
  for (std::size_t il = 1; il + 1 < NI; ++il)
    for (std::size_t xl = 1; xl + 1 < NX; ++xl)
      for (std::size_t t = 1; t + 1 < NT; ++t) {
        const std::size_t k = idx(il, xl, t);
        out.data[k] = static_cast<float>(std::sqrt(fx[k] * fx[k] + fy[k] * fy[k] + fz[k] * fz[k]));
      }
  return out;
}

AttributeMap sobel2d_gradient(const Section& s) {
  require_size(s, 1, "Sobel gradient");
  const Grid2<double> img = to_double(s.data);
  AttributeMap out = blank_map(s, AttributeKind::Gradient, 1);
  for (std::size_t r = 1; r + 1 < s.rows(); ++r) {
    for (std::size_t c = 1; c + 1 < s.cols(); ++c) {
      const double fx = (img(r - 1, c + 1) - img(r - 1, c - 1)) + 2.0 * (img(r, c + 1) - img(r, c - 1)) +
                        (img(r + 1, c + 1) - img(r + 1, c - 1));
      const double fy = (img(r + 1, c - 1) - img(r - 1, c - 1)) + 2.0 * (img(r + 1, c) - img(r - 1, c)) +
                        (img(r + 1, c + 1) - img(r - 1, c + 1));
      out.data(r, c) = static_cast<float>(std::sqrt(fx * fx + fy * fy));
    }
  }
  return out;
}

AttributeMap gradient_map_from_volume(const SeismicVolume& grad, Axis axis, int index) {
  Section slice = extract_section(grad, axis, index);
  AttributeMap out;
  out.data = std::move(slice.data);
  out.kind = AttributeKind::Gradient;
  out.border_margin = 1;
  return out;
}

}  // namespace salttex
