#include "salttex/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>

#include "salttex/error.hpp"

namespace salttex {
namespace {

// Directed nearest-point distances from every point of `from` to `to`.
std::vector<double> nearest_distances(const std::vector<Point>& from, const std::vector<Point>& to) {
  std::vector<double> out(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    long best = std::numeric_limits<long>::max();
    for (const Point& q : to) {
      const long dc = q.col - from[i].col;
      const long dr = q.row - from[i].row;
      best = std::min(best, dc * dc + dr * dr);
    }
    out[i] = std::sqrt(static_cast<double>(best));
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

BoundaryMetrics boundary_metrics(const Boundary& a, const Boundary& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyBoundary, "boundary metrics need two nonempty boundaries");
  const auto ab = nearest_distances(a.points, b.points);
  const auto ba = nearest_distances(b.points, a.points);
  BoundaryMetrics m;
  m.n_points_a = a.size();
  m.n_points_b = b.size();
  m.d_max = std::max(*std::max_element(ab.begin(), ab.end()), *std::max_element(ba.begin(), ba.end()));
  m.mean_sym_dist = 0.5 * (mean_of(ab) + mean_of(ba));
  return m;
}

double amd(std::span<const Boundary> a, std::span<const Boundary> b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::LengthMismatch, "boundary lists differ in length (" + std::to_string(a.size()) + " vs " +
                                               std::to_string(b.size()) + ")");
  if (a.empty()) throw Error(ErrorCode::EmptyInput, "AMD of zero boundary pairs");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += boundary_metrics(a[i], b[i]).d_max;
  return sum / static_cast<double>(a.size());
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "summary of an empty list");
  Summary s;
  s.n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std_dev = std::sqrt(sq / static_cast<double>(s.n));
  return s;
}

void write_metrics_csv(std::span<const SectionScore> rows, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.precision(17);
  out << "index,d_max,mean_sym_dist\n";
  for (const auto& r : rows) out << r.index << ',' << r.metrics.d_max << ',' << r.metrics.mean_sym_dist << '\n';
}

std::string metrics_summary_json(std::span<const SectionScore> rows, const std::string& label) {
  nlohmann::json j;
  j["label"] = label;
  j["sections"] = nlohmann::json::array();
  std::vector<double> dmax;
  std::vector<double> msd;
  for (const auto& r : rows) {
    j["sections"].push_back({{"index", r.index},
                             {"d_max", r.metrics.d_max},
                             {"mean_sym_dist", r.metrics.mean_sym_dist},
                             {"n_points_a", r.metrics.n_points_a},
                             {"n_points_b", r.metrics.n_points_b}});
    dmax.push_back(r.metrics.d_max);
    msd.push_back(r.metrics.mean_sym_dist);
  }
  if (!rows.empty()) {
    const Summary sd = summarize(dmax);
    const Summary sm = summarize(msd);
    j["amd"] = sd.mean;
    j["d_max"] = {{"mean", sd.mean}, {"std_dev", sd.std_dev}};
    j["mean_sym_dist"] = {{"mean", sm.mean}, {"std_dev", sm.std_dev}};
  }
  return j.dump(2);
}

}  // namespace salttex
