#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>

#include "salttex/attributes.hpp"
#include "salttex/error.hpp"

namespace salttex {
namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per window side and never destroyed.
class PlanCache {
 public:
  fftw_plan forward(int side) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(side);
    if (it != plans_.end()) return it->second;
    const auto n = static_cast<std::size_t>(side) * static_cast<std::size_t>(side);
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft_2d(side, side, in, out, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(side, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<int, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

struct Workspace {
  std::vector<std::complex<double>> a;
  std::vector<std::complex<double>> b;
};

fftw_complex* as_fftw(std::vector<std::complex<double>>& v) { return reinterpret_cast<fftw_complex*>(v.data()); }

}  // namespace

double dissimilarity_of_difference(std::span<const double> abs_diff, int side) {
  const auto n = static_cast<std::size_t>(side) * static_cast<std::size_t>(side);
  if (side < 1 || abs_diff.size() != n) throw Error(ErrorCode::ShapeMismatch, "difference block is not side x side");
  thread_local Workspace ws;
  ws.a.resize(n);
  ws.b.resize(n);
  fftw_plan plan = plan_cache().forward(side);

  for (std::size_t i = 0; i < n; ++i) ws.a[i] = {std::abs(abs_diff[i]), 0.0};
  fftw_execute_dft(plan, as_fftw(ws.a), as_fftw(ws.b));
  for (std::size_t i = 0; i < n; ++i) ws.a[i] = {std::abs(ws.b[i]), 0.0};
  fftw_execute_dft(plan, as_fftw(ws.a), as_fftw(ws.b));

  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::abs(ws.b[i]);
  return sum / static_cast<double>(n);
}

double dissimilarity(const Grid2<double>& w_minus, const Grid2<double>& w_plus) {
  if (w_minus.rows() != w_plus.rows() || w_minus.cols() != w_plus.cols())
    throw Error(ErrorCode::ShapeMismatch, "windows differ in shape");
  if (w_minus.rows() != w_minus.cols() || w_minus.empty())
    throw Error(ErrorCode::ShapeMismatch, "windows must be square with side >= 1");
  std::vector<double> diff(w_minus.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = std::abs(w_minus.values()[i] - w_plus.values()[i]);
  return dissimilarity_of_difference(diff, static_cast<int>(w_minus.rows()));
}

}  // namespace salttex
