#include "salttex/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "salttex/error.hpp"
#include "salttex/parallel.hpp"

namespace salttex {

std::string_view feature_mode_name(FeatureMode mode) { return mode == FeatureMode::Vector ? "vector" : "tensor"; }

FeatureMode parse_feature_mode(std::string_view name) {
  if (name == "tensor") return FeatureMode::Tensor;
  if (name == "vector") return FeatureMode::Vector;
  throw Error(ErrorCode::InvalidArgument, "unknown feature mode '" + std::string(name) + "'");
}

void TrackingConfig::validate() const {
  if (patch_size < 3 || patch_size % 2 == 0) throw Error(ErrorCode::InvalidArgument, "patch size must be odd and >= 3");
  if (search_halfwidth < 1) throw Error(ErrorCode::InvalidArgument, "search half-width must be >= 1");
  if (!(lambda_c >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda_c must be >= 0");
  if (!(t_e >= 0.0)) throw Error(ErrorCode::InvalidArgument, "t_e must be >= 0");
  if (median_window < 1) throw Error(ErrorCode::InvalidArgument, "median window must be >= 1");
  for (int d : feature_dims)
    if (d < 1) throw Error(ErrorCode::InvalidArgument, "feature dimensions must be >= 1");
  if (feature_dims[0] > patch_size || feature_dims[1] > patch_size)
    throw Error(ErrorCode::InvalidArgument, "feature dimensions exceed the patch size");
  got.validate();
}

bool patch_fits(std::size_t rows, std::size_t cols, Point center, int patch_size) {
  const int h = patch_size / 2;
  return center.row - h >= 0 && center.col - h >= 0 && center.row + h < static_cast<int>(rows) &&
         center.col + h < static_cast<int>(cols);
}

PatchPair extract_patch_pair(const Image& amp, const Image& got, Point center, int patch_size) {
  const int h = patch_size / 2;
  PatchPair pp;
  pp.center = center;
  pp.amp.resize(patch_size, patch_size);
  pp.got.resize(patch_size, patch_size);
  for (int a = 0; a < patch_size; ++a)
    for (int b = 0; b < patch_size; ++b) {
      pp.amp(a, b) = amp(center.row - h + a, center.col - h + b);
      pp.got(a, b) = got(center.row - h + a, center.col - h + b);
    }
  return pp;
}

PatchTensors build_patch_tensors(const Section& ref, const AttributeMap& ref_got, const Boundary& b,
                                 const TrackingConfig& cfg) {
  if (ref.rows() != ref_got.data.rows() || ref.cols() != ref_got.data.cols())
    throw Error(ErrorCode::ShapeMismatch, "GoT map does not match the reference section");
  PatchTensors t;
  for (const Point& p : b.points) {
    if (!patch_fits(ref.rows(), ref.cols(), p, cfg.patch_size)) {
      ++t.skipped;
      continue;
    }
    PatchPair pp = extract_patch_pair(ref.data, ref_got.data, p, cfg.patch_size);
    t.amp.push_back(std::move(pp.amp));
    t.got.push_back(std::move(pp.got));
    t.centers.push_back(p);
  }
  const std::size_t need = static_cast<std::size_t>(std::max(cfg.feature_dims[2], 2));
  if (t.centers.size() < need)
    throw Error(ErrorCode::TooFewPatches, std::to_string(t.centers.size()) + " usable boundary patches, need " +
                                              std::to_string(need));
  return t;
}

SubspaceModel learn_model(const PatchTensors& tensors, const TrackingConfig& cfg) {
  cfg.validate();
  SubspaceModel m;
  m.patch_size = cfg.patch_size;
  m.feature_dims = cfg.feature_dims;
  m.t_e = cfg.t_e;
  m.noise_adjusted = cfg.noise_adjusted;
  m.features = cfg.features;
  m.n_training = tensors.centers.size();
  if (cfg.features == FeatureMode::Vector) {
    const int d = std::min<int>(cfg.feature_dims[0], static_cast<int>(tensors.amp.size()));
    m.amp = learn_vector_subspace(tensors.amp, d, &m.warnings);
    m.got = learn_vector_subspace(tensors.got, d, &m.warnings);
  } else {
    m.amp = learn_subspace(tensors.amp, cfg.feature_dims, cfg.noise_adjusted, &m.warnings);
    m.got = learn_subspace(tensors.got, cfg.feature_dims, cfg.noise_adjusted, &m.warnings);
  }
  return m;
}

SubspaceModel build_model(const Section& ref, const Boundary& b, const TrackingConfig& cfg) {
  cfg.validate();
  const Section ns = ref.normalized ? ref : normalize_section(ref);
  const AttributeMap g = got_map(ns, cfg.got);
  return learn_model(build_patch_tensors(ns, g, b, cfg), cfg);
}

double reconstruction_error(const PatchPair& pp, const SubspaceModel& model) {
  const double ea = relative_residual(pp.amp, model.amp);
  const double eg = relative_residual(pp.got, model.got);
  return std::sqrt(ea * ea + eg * eg);
}

PatchClass classify(const PatchPair& pp, const SubspaceModel& model) {
  return reconstruction_error(pp, model) <= model.t_e ? PatchClass::Boundary : PatchClass::NonBoundary;
}

Mask median_filter_binary(const Mask& m, int window) {
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  Mask out(m.rows(), m.cols(), 0);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      int count = 0;
      for (int a = 0; a < window; ++a)
        for (int b = 0; b < window; ++b)
          if (m.contains(r + a, c + b) && m(r + a, c + b) != 0) ++count;
      out(r, c) = 2 * count >= window * window ? 1 : 0;
    }
  return out;
}

std::vector<Point> median_survivors(const std::vector<Point>& points, std::size_t rows, std::size_t cols,
                                    int window) {
  Mask raster(rows, cols, 0);
  for (const Point& p : points)
    if (raster.contains(p)) raster.at(p) = 1;
  const Mask kept = median_filter_binary(raster, window);
  std::vector<Point> out;
  for (int r = 0; r < static_cast<int>(rows); ++r)
    for (int c = 0; c < static_cast<int>(cols); ++c) {
      if (raster(r, c) == 0) continue;
      bool survives = false;
      for (int a = 0; a < window && !survives; ++a)
        for (int b = 0; b < window && !survives; ++b)
          survives = kept.contains(r - a, c - b) && kept(r - a, c - b) != 0;
      if (survives) out.push_back({c, r});
    }
  return out;
}

namespace {

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

constexpr int kRadialWindow = 9;
constexpr double kMadFactor = 3.0;
constexpr double kMadFloor = 0.5;

}  // namespace

Boundary reconnect(std::vector<Point> points, ReconnectStats* stats) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 3) throw Error(ErrorCode::TooFewTrackedPoints, "fewer than 3 tracked points to reconnect");

  double cc = 0.0;
  double cr = 0.0;
  for (const Point& p : points) {
    cc += p.col;
    cr += p.row;
  }
  cc /= static_cast<double>(points.size());
  cr /= static_cast<double>(points.size());

  struct Polar {
    Point p;
    double angle;
    double radius;
  };
  std::vector<Polar> polar;
  for (const Point& p : points)
    polar.push_back({p, std::atan2(p.row - cr, p.col - cc), std::hypot(p.col - cc, p.row - cr)});
  std::sort(polar.begin(), polar.end(), [](const Polar& a, const Polar& b) {
    if (a.angle != b.angle) return a.angle < b.angle;
    if (a.radius != b.radius) return a.radius < b.radius;
    return a.p < b.p;
  });

  const int n = static_cast<int>(polar.size());
  const int half = std::min(kRadialWindow / 2, (n - 1) / 2);
  std::vector<double> residual(static_cast<std::size_t>(n));
  std::vector<double> window;
  for (int i = 0; i < n; ++i) {
    window.clear();
    for (int k = -half; k <= half; ++k) window.push_back(polar[static_cast<std::size_t>(((i + k) % n + n) % n)].radius);
    residual[static_cast<std::size_t>(i)] = polar[static_cast<std::size_t>(i)].radius - median_of(window);
  }
  std::vector<double> abs_res(residual.size());
  std::transform(residual.begin(), residual.end(), abs_res.begin(), [](double v) { return std::abs(v); });
  const double limit = kMadFactor * std::max(median_of(abs_res), kMadFloor);

  std::vector<Point> kept;
  for (int i = 0; i < n; ++i)
    if (std::abs(residual[static_cast<std::size_t>(i)]) <= limit) kept.push_back(polar[static_cast<std::size_t>(i)].p);
  if (stats != nullptr) stats->outliers = polar.size() - kept.size();
  if (kept.size() < 3) throw Error(ErrorCode::TooFewTrackedPoints, "fewer than 3 points left after outlier rejection");

  Boundary b;
  b.closed = true;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const Point a = kept[i];
    const Point z = kept[(i + 1) % kept.size()];
    const int steps = std::max(std::abs(z.col - a.col), std::abs(z.row - a.row));
    for (int s = 0; s < std::max(steps, 1); ++s) {
      const double t = steps == 0 ? 0.0 : static_cast<double>(s) / steps;
      const Point q{static_cast<int>(std::lround(a.col + t * (z.col - a.col))),
                    static_cast<int>(std::lround(a.row + t * (z.row - a.row)))};
      if (b.points.empty() || !(b.points.back() == q)) b.points.push_back(q);
    }
  }
  while (b.points.size() > 1 && b.points.back() == b.points.front()) b.points.pop_back();
  return b;
}

std::vector<std::array<double, 2>> boundary_normals(const Boundary& b) {
  const auto n = static_cast<int>(b.points.size());
  std::vector<std::array<double, 2>> normals(b.points.size(), {1.0, 0.0});
  for (int i = 0; i < n; ++i) {
    int prev = i - 1;
    int next = i + 1;
    if (b.closed) {
      prev = (prev + n) % n;
      next = next % n;
    } else {
      prev = std::max(prev, 0);
      next = std::min(next, n - 1);
    }
    const double tc = b.points[static_cast<std::size_t>(next)].col - b.points[static_cast<std::size_t>(prev)].col;
    const double tr = b.points[static_cast<std::size_t>(next)].row - b.points[static_cast<std::size_t>(prev)].row;
    const double len = std::hypot(tc, tr);
    if (len > 0.0) normals[static_cast<std::size_t>(i)] = {-tr / len, tc / len};
  }
  return normals;
}

TrackedSection track_section(const SubspaceModel& model, const Boundary& ref, const Section& target,
                             const TrackingConfig& cfg) {
  cfg.validate();
  const Section ns = target.normalized ? target : normalize_section(target);
  return track_section(model, ref, ns, got_map(ns, cfg.got), cfg);
}

TrackedSection track_section(const SubspaceModel& model, const Boundary& ref, const Section& target,
                             const AttributeMap& target_got, const TrackingConfig& cfg) {
  cfg.validate();
  if (target.rows() != target_got.data.rows() || target.cols() != target_got.data.cols())
    throw Error(ErrorCode::ShapeMismatch, "GoT map does not match the target section");
  if (model.patch_size != cfg.patch_size) throw Error(ErrorCode::ShapeMismatch, "model and config patch sizes differ");
  if (ref.empty()) throw Error(ErrorCode::EmptyBoundary, "reference boundary is empty");

  const auto normals = boundary_normals(ref);
  const int n = static_cast<int>(ref.points.size());
  const int h = cfg.search_halfwidth;
  // Candidate order 0, -1, +1, -2, +2, ... so strict improvement keeps the
  // smallest |k|, then the smallest k.
  std::vector<int> offsets{0};
  for (int k = 1; k <= h; ++k) {
    offsets.push_back(-k);
    offsets.push_back(k);
  }

  std::vector<std::optional<Point>> tracked(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic) num_threads(worker_threads())
  for (int i = 0; i < n; ++i) {
    const Point p = ref.points[static_cast<std::size_t>(i)];
    const auto& nv = normals[static_cast<std::size_t>(i)];
    struct Candidate {
      Point q;
      double err;
      double g;
    };
    std::vector<Candidate> cands;
    cands.reserve(offsets.size());
    for (int k : offsets) {
      const Point q{static_cast<int>(std::lround(p.col + k * nv[0])), static_cast<int>(std::lround(p.row + k * nv[1]))};
      if (!patch_fits(target.rows(), target.cols(), q, cfg.patch_size)) continue;
      const PatchPair pp = extract_patch_pair(target.data, target_got.data, q, cfg.patch_size);
      cands.push_back({q, reconstruction_error(pp, model), target_got.data.at(q)});
    }
    if (cands.empty()) continue;
    double g_lo = std::numeric_limits<double>::infinity();
    double g_hi = -g_lo;
    for (const auto& c : cands) {
      g_lo = std::min(g_lo, c.g);
      g_hi = std::max(g_hi, c.g);
    }
    const double g_span = g_hi - g_lo;
    std::size_t best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cands.size(); ++c) {
      const double g_hat = g_span > 0.0 ? (cands[c].g - g_lo) / g_span : 0.0;
      const double score = cands[c].err - cfg.lambda_c * g_hat;
      if (score < best_score) {
        best_score = score;
        best = c;
      }
    }
    if (cands[best].err <= cfg.t_e) tracked[static_cast<std::size_t>(i)] = cands[best].q;
  }

  TrackedSection out;
  out.section_index = target.index;
  out.reference_points = ref.points.size();
  std::vector<Point> accepted;
  for (const auto& t : tracked)
    if (t) accepted.push_back(*t);
  out.accepted = accepted.size();
  out.missing = ref.points.size() - accepted.size();

  const std::vector<Point> survivors = median_survivors(accepted, target.rows(), target.cols(), cfg.median_window);
  std::vector<Point> distinct = accepted;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  out.median_dropped = distinct.size() - survivors.size();
  if (survivors.size() < 3)
    throw Error(ErrorCode::TooFewTrackedPoints, "section " + std::to_string(target.index) + ": only " +
                                                    std::to_string(survivors.size()) + " points survive cleanup");

  ReconnectStats stats;
  out.boundary = reconnect(survivors, &stats);
  out.boundary.section_index = target.index;
  out.outliers = stats.outliers;
  return out;
}

std::vector<TrackedSection> track_volume(const SeismicVolume& vol, Axis axis, int ref_index, const Boundary& ref,
                                         const TrackingConfig& cfg) {
  cfg.validate();
  const Section ref_section = normalize_section(extract_section(vol, axis, ref_index));
  const SubspaceModel model = build_model(ref_section, ref, cfg);
  const int count = static_cast<int>(axis == Axis::Inline ? vol.n_inline : vol.n_crossline);
  std::vector<TrackedSection> out;
  for (int idx = 0; idx < count; ++idx) {
    const Section target = normalize_section(extract_section(vol, axis, idx));
    out.push_back(track_section(model, ref, target, cfg));
  }
  return out;
}

}  // namespace salttex
