#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace salttex {

/// Pixel coordinate. Columns run along the trace axis, rows along time/depth.
struct Point {
  int col = 0;
  int row = 0;

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

/// Dense row-major 2D array.
template <typename T>
class Grid2 {
 public:
  Grid2() = default;
  Grid2(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  T& at(Point p) { return (*this)(static_cast<std::size_t>(p.row), static_cast<std::size_t>(p.col)); }
  const T& at(Point p) const {
    return (*this)(static_cast<std::size_t>(p.row), static_cast<std::size_t>(p.col));
  }

  bool contains(int r, int c) const noexcept {
    return r >= 0 && c >= 0 && static_cast<std::size_t>(r) < rows_ && static_cast<std::size_t>(c) < cols_;
  }
  bool contains(Point p) const noexcept { return contains(p.row, p.col); }

  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }
  std::vector<T>& storage() noexcept { return values_; }
  const std::vector<T>& storage() const noexcept { return values_; }

  Grid2 transposed() const {
    Grid2 out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
    return out;
  }

  friend bool operator==(const Grid2&, const Grid2&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> values_;
};

using Image = Grid2<float>;
using Mask = Grid2<unsigned char>;

}  // namespace salttex
