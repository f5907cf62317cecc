#pragma once

// Tucker-style subspace oracle: explicit unfoldings, Jacobi eigenvectors.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "salttex/tensor_subspace.hpp"

namespace oracle {

inline salttex::SliceStack random_stack(std::mt19937_64& rng, int n1, int n2, int k) {
  std::normal_distribution<double> g;
  salttex::SliceStack s;
  for (int i = 0; i < k; ++i) {
    Eigen::MatrixXd m(n1, n2);
    for (Eigen::Index a = 0; a < m.size(); ++a) m.data()[a] = g(rng);
    s.push_back(m);
  }
  return s;
}

// Independent route: explicit unfoldings as nested vectors, Jacobi eigenvectors.
struct OracleModel {
  Matrix u1, u2, u3;
  std::vector<Matrix> centered;
};

inline Matrix take_columns(const Matrix& v, int d) {
  Matrix out = zeros(v.size(), d);
  for (std::size_t r = 0; r < v.size(); ++r)
    for (int c = 0; c < d; ++c) out[r][c] = v[r][c];
  return out;
}

inline OracleModel oracle_subspace(const salttex::SliceStack& slices, std::array<int, 3> dims) {
  const int n1 = static_cast<int>(slices[0].rows()), n2 = static_cast<int>(slices[0].cols());
  const int k = static_cast<int>(slices.size());
  std::vector<Matrix> y;
  for (const auto& s : slices) {
    double dc = 0;
    for (int a = 0; a < n1; ++a)
      for (int b = 0; b < n2; ++b) dc += s(a, b);
    dc /= n1 * n2;
    Matrix m = zeros(n1, n2);
    for (int a = 0; a < n1; ++a)
      for (int b = 0; b < n2; ++b) m[a][b] = s(a, b) - dc;
    y.push_back(m);
  }
  Matrix mean = zeros(n1, n2);
  for (const auto& m : y)
    for (int a = 0; a < n1; ++a)
      for (int b = 0; b < n2; ++b) mean[a][b] += m[a][b] / k;
  for (auto& m : y)
    for (int a = 0; a < n1; ++a)
      for (int b = 0; b < n2; ++b) m[a][b] -= mean[a][b];

  // mode-1 unfolding is n1 x (n2 K); its Gram matrix:
  Matrix c1 = zeros(n1, n1), c2 = zeros(n2, n2), c3 = zeros(k, k);
  for (const auto& m : y) {
    for (int a = 0; a < n1; ++a)
      for (int b = 0; b < n1; ++b)
        for (int c = 0; c < n2; ++c) c1[a][b] += m[a][c] * m[b][c];
    for (int a = 0; a < n2; ++a)
      for (int b = 0; b < n2; ++b)
        for (int c = 0; c < n1; ++c) c2[a][b] += m[c][a] * m[c][b];
  }
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      for (int r = 0; r < n1; ++r)
        for (int c = 0; c < n2; ++c) c3[a][b] += y[a][r][c] * y[b][r][c];
  OracleModel o;
  o.u1 = take_columns(jacobi_eigen(c1).second, dims[0]);
  o.u2 = take_columns(jacobi_eigen(c2).second, dims[1]);
  o.u3 = take_columns(jacobi_eigen(c3).second, dims[2]);
  o.centered = y;
  return o;
}

// Largest per-column relative deviation, allowing a sign flip per column.
inline double basis_gap(const Eigen::MatrixXd& got, const Matrix& want) {
  double worst = 0;
  for (Eigen::Index c = 0; c < got.cols(); ++c) {
    double plus = 0, minus = 0, norm = 0;
    for (Eigen::Index r = 0; r < got.rows(); ++r) {
      plus += std::pow(got(r, c) - want[r][c], 2);
      minus += std::pow(got(r, c) + want[r][c], 2);
      norm += want[r][c] * want[r][c];
    }
    worst = std::max(worst, std::sqrt(std::min(plus, minus) / norm));
  }
  return worst;
}

inline double oracle_residual(const Matrix& x, const Matrix& u1, const Matrix& u2) {
  const std::size_t n1 = x.size(), n2 = x[0].size(), d1 = u1[0].size(), d2 = u2[0].size();
  // P1 X P2 with P = U U^T
  Matrix p1 = zeros(n1, n1), p2 = zeros(n2, n2);
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t b = 0; b < n1; ++b)
      for (std::size_t j = 0; j < d1; ++j) p1[a][b] += u1[a][j] * u1[b][j];
  for (std::size_t a = 0; a < n2; ++a)
    for (std::size_t b = 0; b < n2; ++b)
      for (std::size_t j = 0; j < d2; ++j) p2[a][b] += u2[a][j] * u2[b][j];
  Matrix t = zeros(n1, n2), r = zeros(n1, n2);
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t b = 0; b < n2; ++b)
      for (std::size_t c = 0; c < n1; ++c) t[a][b] += p1[a][c] * x[c][b];
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t b = 0; b < n2; ++b)
      for (std::size_t c = 0; c < n2; ++c) r[a][b] += t[a][c] * p2[c][b];
  double num = 0, den = 0;
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t b = 0; b < n2; ++b) {
      num += std::pow(x[a][b] - r[a][b], 2);
      den += x[a][b] * x[a][b];
    }
  return std::sqrt(num / den);
}

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.size(), m[0].size());
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m[0].size(); ++c) e(r, c) = m[r][c];
  return e;
}

}  // namespace oracle
