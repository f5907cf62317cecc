#include "salttex/segmentation.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>

#include "salttex/error.hpp"

namespace salttex {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

struct Rect {
  int r0, r1, c0, c1;  // half-open
  bool empty() const { return r0 >= r1 || c0 >= c1; }
};

Rect interior_of(const AttributeMap& m, int margin) {
  const int rows = static_cast<int>(m.data.rows());
  const int cols = static_cast<int>(m.data.cols());
  margin = std::max(margin, 0);
  return {margin, rows - margin, margin, cols - margin};
}

constexpr std::array<std::array<int, 2>, 4> kFour{{{0, 1}, {1, 0}, {0, -1}, {-1, 0}}};

}  // namespace

DetectionConfig& DetectionConfig::with_threshold(double t) {
  threshold_mode = ThresholdMode::Manual;
  t_g = t;
  return *this;
}

DetectionConfig& DetectionConfig::with_seed(Point p) {
  seed_mode = SeedMode::Manual;
  seed = p;
  return *this;
}

void DetectionConfig::validate() const {
  if (threshold_mode == ThresholdMode::Manual && !t_g)
    throw Error(ErrorCode::InvalidArgument, "manual threshold mode needs t_g");
  if (t_g && !(*t_g > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_g must be positive");
  if (seed_mode == SeedMode::Manual && !seed) throw Error(ErrorCode::InvalidArgument, "manual seed mode needs a seed");
  if (!(smoothing_sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "smoothing sigma must be positive");
  if (morph_radius < 0) throw Error(ErrorCode::InvalidArgument, "morphology radius must be >= 0");
  got.validate();
}

int otsu_threshold(std::span<const double> histogram) {
  const int n = static_cast<int>(histogram.size());
  double total = 0.0;
  double total_moment = 0.0;
  int nonzero = 0;
  for (int i = 0; i < n; ++i) {
    const double h = histogram[static_cast<std::size_t>(i)];
    if (!(h >= 0.0) || !std::isfinite(h)) throw Error(ErrorCode::InvalidArgument, "histogram counts must be finite and >= 0");
    if (h > 0.0) ++nonzero;
    total += h;
    total_moment += i * h;
  }
  if (nonzero < 2) throw Error(ErrorCode::DegenerateHistogram, "histogram mass lies in a single bin");

  int best_t = 1;
  double best = -1.0;
  double w1 = 0.0;
  double m1 = 0.0;
  for (int t = 1; t < n; ++t) {
    const double h = histogram[static_cast<std::size_t>(t - 1)];
    w1 += h;
    m1 += (t - 1) * h;
    const double w2 = total - w1;
    double between = 0.0;
    if (w1 > 0.0 && w2 > 0.0) {
      const double gap = m1 / w1 - (total_moment - m1) / w2;
      between = (w1 / total) * (w2 / total) * gap * gap;
    }
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return best_t;
}

std::vector<double> interior_histogram(const AttributeMap& map, int bins) {
  if (bins < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 histogram bins");
  const Rect in = interior_of(map, map.border_margin);
  if (in.empty()) throw Error(ErrorCode::EmptyInput, "attribute map has no interior");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int r = in.r0; r < in.r1; ++r)
    for (int c = in.c0; c < in.c1; ++c) {
      lo = std::min<double>(lo, map.data(r, c));
      hi = std::max<double>(hi, map.data(r, c));
    }
  if (!(hi > lo)) throw Error(ErrorCode::DegenerateHistogram, "attribute map interior is constant");
  std::vector<double> hist(static_cast<std::size_t>(bins), 0.0);
  for (int r = in.r0; r < in.r1; ++r)
    for (int c = in.c0; c < in.c1; ++c) {
      const auto b = static_cast<int>(std::floor((map.data(r, c) - lo) / (hi - lo) * bins));
      hist[static_cast<std::size_t>(std::min(b, bins - 1))] += 1.0;
    }
  return hist;
}

double otsu_threshold_value(const AttributeMap& map, int bins) {
  const std::vector<double> hist = interior_histogram(map, bins);
  const Rect in = interior_of(map, map.border_margin);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int r = in.r0; r < in.r1; ++r)
    for (int c = in.c0; c < in.c1; ++c) {
      lo = std::min<double>(lo, map.data(r, c));
      hi = std::max<double>(hi, map.data(r, c));
    }
  const int t = otsu_threshold(hist);
  return lo + t * (hi - lo) / bins;
}

Grid2<double> smooth_interior(const AttributeMap& map, double sigma, int half) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
  if (half < 0) throw Error(ErrorCode::InvalidArgument, "kernel half-size must be >= 0");
  const Rect in = interior_of(map, map.border_margin);
  if (in.empty()) throw Error(ErrorCode::EmptyInput, "attribute map has no interior");

  const int side = 2 * half + 1;
  std::vector<double> kernel(static_cast<std::size_t>(side * side));
  double sum = 0.0;
  for (int a = -half; a <= half; ++a)
    for (int b = -half; b <= half; ++b) {
      const double w = std::exp(-(a * a + b * b) / (2.0 * sigma * sigma));
      kernel[static_cast<std::size_t>((a + half) * side + (b + half))] = w;
      sum += w;
    }
  for (double& w : kernel) w /= sum;

  Grid2<double> out(map.data.rows(), map.data.cols(), 0.0);
  for (int r = 0; r < static_cast<int>(out.rows()); ++r)
    for (int c = 0; c < static_cast<int>(out.cols()); ++c) {
      double acc = 0.0;
      for (int a = -half; a <= half; ++a) {
        const int rr = std::clamp(r + a, in.r0, in.r1 - 1);
        for (int b = -half; b <= half; ++b) {
          const int cc = std::clamp(c + b, in.c0, in.c1 - 1);
          acc += kernel[static_cast<std::size_t>((a + half) * side + (b + half))] * map.data(rr, cc);
        }
      }
      out(r, c) = acc;
    }
  return out;
}

Point select_seed(const AttributeMap& d_map, double sigma, int half, int exclude_margin) {
  if (d_map.data.empty()) throw Error(ErrorCode::EmptyInput, "empty directionality map");
  const Grid2<double> smooth = smooth_interior(d_map, sigma, half);
  const Rect in = interior_of(d_map, exclude_margin < 0 ? d_map.border_margin : exclude_margin);
  if (in.empty()) throw Error(ErrorCode::SectionTooSmall, "no admissible seed positions");
  Point best{in.c0, in.r0};
  double best_v = std::numeric_limits<double>::infinity();
  for (int r = in.r0; r < in.r1; ++r)
    for (int c = in.c0; c < in.c1; ++c)
      if (smooth(r, c) < best_v) {
        best_v = smooth(r, c);
        best = {c, r};
      }
  return best;
}

Mask region_grow(const AttributeMap& g_map, Point seed, double t_g) {
  if (!g_map.data.contains(seed) || !g_map.in_interior(seed.row, seed.col))
    throw Error(ErrorCode::SeedOutOfRange, "seed (" + std::to_string(seed.col) + "," + std::to_string(seed.row) +
                                               ") is outside the attribute interior");
  if (!(g_map.data.at(seed) < t_g))
    throw Error(ErrorCode::SeedAboveThreshold, "attribute at seed is " + std::to_string(g_map.data.at(seed)) +
                                                   ", threshold " + std::to_string(t_g));
  Mask mask(g_map.data.rows(), g_map.data.cols(), 0);
  std::deque<Point> queue{seed};
  mask.at(seed) = 1;
  while (!queue.empty()) {
    const Point p = queue.front();
    queue.pop_front();
    for (const auto& d : kFour) {
      const Point q{p.col + d[1], p.row + d[0]};
      if (!g_map.in_interior(q.row, q.col) || mask.at(q) != 0) continue;
      if (g_map.data.at(q) < t_g) {
        mask.at(q) = 1;
        queue.push_back(q);
      }
    }
  }
  return mask;
}

namespace {

// Separable square max (dilate) or min (erode) restricted to the frame.
Mask square_filter(const Mask& m, int radius, bool take_max) {
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  Mask tmp(m.rows(), m.cols(), 0);
  Mask out(m.rows(), m.cols(), 0);
  auto pick = [&](unsigned char a, unsigned char b) { return take_max ? std::max(a, b) : std::min(a, b); };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      unsigned char v = m(r, c);
      for (int k = std::max(0, c - radius); k <= std::min(cols - 1, c + radius); ++k) v = pick(v, m(r, k));
      tmp(r, c) = v;
    }
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      unsigned char v = tmp(r, c);
      for (int k = std::max(0, r - radius); k <= std::min(rows - 1, r + radius); ++k) v = pick(v, tmp(k, c));
      out(r, c) = v;
    }
  return out;
}

}  // namespace

Mask dilate(const Mask& m, int radius) { return radius <= 0 ? m : square_filter(m, radius, true); }
Mask erode(const Mask& m, int radius) { return radius <= 0 ? m : square_filter(m, radius, false); }

Mask fill_holes(const Mask& m) {
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  Mask outside(m.rows(), m.cols(), 0);
  std::deque<Point> queue;
  auto visit = [&](int r, int c) {
    if (r < 0 || c < 0 || r >= rows || c >= cols) return;
    if (m(r, c) != 0 || outside(r, c) != 0) return;
    outside(r, c) = 1;
    queue.push_back({c, r});
  };
  for (int r = 0; r < rows; ++r) {
    visit(r, 0);
    visit(r, cols - 1);
  }
  for (int c = 0; c < cols; ++c) {
    visit(0, c);
    visit(rows - 1, c);
  }
  while (!queue.empty()) {
    const Point p = queue.front();
    queue.pop_front();
    for (const auto& d : kFour) visit(p.row + d[0], p.col + d[1]);
  }
  Mask out(m.rows(), m.cols(), 0);
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] = outside.values()[i] == 0 ? 1 : 0;
  return out;
}

Mask enhance_mask(const Mask& m, int radius) {
  if (radius < 0) throw Error(ErrorCode::InvalidArgument, "morphology radius must be >= 0");
  return fill_holes(erode(dilate(m, radius), radius));
}

Mask largest_component(const Mask& m) {
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  Grid2<int> label(m.rows(), m.cols(), 0);
  int next = 0;
  int best_label = 0;
  std::size_t best_size = 0;
  std::vector<Point> stack;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (m(r, c) == 0 || label(r, c) != 0) continue;
      ++next;
      std::size_t size = 0;
      label(r, c) = next;
      stack.push_back({c, r});
      while (!stack.empty()) {
        const Point p = stack.back();
        stack.pop_back();
        ++size;
        for (const auto& d : kFour) {
          const int rr = p.row + d[0];
          const int cc = p.col + d[1];
          if (!m.contains(rr, cc) || m(rr, cc) == 0 || label(rr, cc) != 0) continue;
          label(rr, cc) = next;
          stack.push_back({cc, rr});
        }
      }
      if (size > best_size) {
        best_size = size;
        best_label = next;
      }
    }
  Mask out(m.rows(), m.cols(), 0);
  if (best_label == 0) return out;
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] = label.values()[i] == best_label ? 1 : 0;
  return out;
}

Boundary trace_boundary(const Mask& m) {
  const Mask comp = largest_component(m);
  Point start{-1, -1};
  for (int r = 0; r < static_cast<int>(comp.rows()) && start.row < 0; ++r)
    for (int c = 0; c < static_cast<int>(comp.cols()); ++c)
      if (comp(r, c) != 0) {
        start = {c, r};
        break;
      }
  if (start.row < 0) throw Error(ErrorCode::EmptyMask, "mask has no foreground pixels");

  // Clockwise with rows pointing down: W, NW, N, NE, E, SE, S, SW as (dcol, drow).
  constexpr std::array<std::array<int, 2>, 8> kMoore{
      {{-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}}};
  auto inside = [&](Point p) { return comp.contains(p) && comp.at(p) != 0; };
  auto direction_of = [&](Point from, Point to) {
    for (int k = 0; k < 8; ++k)
      if (from.col + kMoore[k][0] == to.col && from.row + kMoore[k][1] == to.row) return k;
    return 0;
  };

  Boundary b;
  b.closed = true;
  b.points.push_back(start);
  Point cur = start;
  int back = 0;  // west of the first raster pixel is always background
  const std::size_t limit = 4 * comp.size() + 8;
  for (std::size_t step = 0; step < limit; ++step) {
    int found = -1;
    for (int k = 1; k <= 8; ++k) {
      const int d = (back + k) % 8;
      if (inside({cur.col + kMoore[d][0], cur.row + kMoore[d][1]})) {
        found = d;
        break;
      }
    }
    if (found < 0) break;  // isolated pixel
    const Point next{cur.col + kMoore[found][0], cur.row + kMoore[found][1]};
    const int prev = (found + 7) % 8;
    const Point backtrack{cur.col + kMoore[prev][0], cur.row + kMoore[prev][1]};
    if (cur == start && b.points.size() >= 2 && next == b.points[1]) break;
    b.points.push_back(next);
    back = direction_of(next, backtrack);
    cur = next;
  }
  if (b.points.size() > 1 && b.points.back() == b.points.front()) b.points.pop_back();
  return b;
}

AttributeMap compute_attribute(const Section& s, AttributeKind kind, const DetectionConfig& cfg) {
  const Section ns = s.normalized ? s : normalize_section(s);
  switch (kind) {
    case AttributeKind::Got: return got_map(ns, cfg.got);
    case AttributeKind::Directionality: return directionality_map(ns, cfg.got.scales);
    case AttributeKind::GlcmContrast: return glcm_contrast_map(ns, cfg.glcm);
    case AttributeKind::Gradient: return sobel2d_gradient(ns);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown attribute kind");
}

DetectionResult detect_on_maps(const AttributeMap& attr, const AttributeMap* d_map, const DetectionConfig& cfg) {
  cfg.validate();
  DetectionResult res;
  auto t0 = Clock::now();
  res.threshold = cfg.threshold_mode == ThresholdMode::Manual ? *cfg.t_g : otsu_threshold_value(attr);
  res.timings_ms["threshold"] = elapsed_ms(t0);

  t0 = Clock::now();
  if (cfg.seed_mode == SeedMode::Manual) {
    res.seed = *cfg.seed;
  } else {
    if (d_map == nullptr) throw Error(ErrorCode::InvalidArgument, "auto seeding needs a directionality map");
    const int half = static_cast<int>(cfg.got.scales.size());
    res.seed = select_seed(*d_map, cfg.smoothing_sigma, half, std::max(d_map->border_margin, attr.border_margin));
  }
  res.timings_ms["seed"] = elapsed_ms(t0);

  t0 = Clock::now();
  const Mask grown = region_grow(attr, res.seed, res.threshold);
  res.timings_ms["region_grow"] = elapsed_ms(t0);

  t0 = Clock::now();
  res.mask = enhance_mask(grown, cfg.morph_radius);
  res.boundary = trace_boundary(res.mask);
  res.timings_ms["enhance_trace"] = elapsed_ms(t0);
  res.attribute = attr;
  return res;
}

namespace {

DetectionResult detect_with_attr(const Section& ns, AttributeMap attr, const DetectionConfig& cfg,
                                 double attr_ms) {
  std::optional<AttributeMap> d_map;
  double dir_ms = 0.0;
  if (cfg.seed_mode == SeedMode::Auto) {
    const auto t0 = Clock::now();
    d_map = directionality_map(ns, cfg.got.scales);
    dir_ms = elapsed_ms(t0);
  }
  DetectionResult res = detect_on_maps(attr, d_map ? &*d_map : nullptr, cfg);
  res.timings_ms["attribute"] = attr_ms;
  res.timings_ms["directionality"] = dir_ms;
  res.boundary.section_index = ns.index;
  return res;
}

}  // namespace

DetectionResult detect(const Section& s, const DetectionConfig& cfg, AttributeKind attr) {
  cfg.validate();
  if (attr == AttributeKind::Directionality)
    throw Error(ErrorCode::InvalidArgument, "directionality is used for seeding, not as a detection attribute");
  const Section ns = s.normalized ? s : normalize_section(s);
  const auto t0 = Clock::now();
  AttributeMap map = compute_attribute(ns, attr, cfg);
  return detect_with_attr(ns, std::move(map), cfg, elapsed_ms(t0));
}

DetectionResult detect(const SeismicVolume& vol, Axis axis, int index, const DetectionConfig& cfg,
                       AttributeKind attr) {
  cfg.validate();
  const Section ns = normalize_section(extract_section(vol, axis, index));
  if (attr != AttributeKind::Gradient) return detect(ns, cfg, attr);

  const auto t0 = Clock::now();
  AttributeMap map = gradient_map_from_volume(sobel3d_gradient(normalize_volume(vol)), axis, index);
  return detect_with_attr(ns, std::move(map), cfg, elapsed_ms(t0));
}

}  // namespace salttex
