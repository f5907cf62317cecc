#include "salttex/tensor_subspace.hpp"

#include <algorithm>
#include <cmath>

#include "salttex/error.hpp"

namespace salttex {
namespace {

constexpr double kRankTol = 1e-10;

void fix_signs(Eigen::MatrixXd& basis) {
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    Eigen::Index arg = 0;
    basis.col(j).cwiseAbs().maxCoeff(&arg);
    if (basis(arg, j) < 0) basis.col(j) *= -1.0;
  }
}

int numerical_rank(const Eigen::VectorXd& descending) {
  if (descending.size() == 0 || !(descending(0) > 0.0)) return 0;
  const double tol = descending(0) * kRankTol;
  int r = 0;
  while (r < descending.size() && descending(r) > tol) ++r;
  return r;
}

void note_deficit(std::vector<std::string>* warnings, const char* mode, int requested, int used) {
  if (warnings == nullptr || used >= requested) return;
  warnings->push_back(std::string(error_code_name(ErrorCode::DegenerateCovariance)) + ": " + mode + " rank " +
                      std::to_string(used) + " < requested " + std::to_string(requested) + ", dimension reduced");
}

}  // namespace

Eigen::MatrixXd remove_dc(const Eigen::MatrixXd& slice) { return slice.array() - slice.mean(); }

Eigen::MatrixXd top_eigenvectors(const Eigen::MatrixXd& cov, int d, Eigen::VectorXd* values, bool* rank_deficit) {
  if (cov.rows() != cov.cols()) throw Error(ErrorCode::ShapeMismatch, "covariance must be square");
  if (d < 0 || d > cov.rows()) throw Error(ErrorCode::InvalidArgument, "requested dimension exceeds the mode size");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const Eigen::Index n = cov.rows();
  Eigen::VectorXd evals = solver.eigenvalues().reverse();
  Eigen::MatrixXd evecs = solver.eigenvectors().rowwise().reverse();
  const int used = std::min(d, numerical_rank(evals));
  if (rank_deficit != nullptr) *rank_deficit = used < d;
  Eigen::MatrixXd basis = evecs.leftCols(used);
  fix_signs(basis);
  if (values != nullptr) *values = evals.head(std::min<Eigen::Index>(n, std::max(used, 0)));
  return basis;
}

Eigen::MatrixXd snr_basis(const Eigen::MatrixXd& cov, const Eigen::MatrixXd& noise_cov, int d, Eigen::VectorXd* values,
                          bool* rank_deficit) {
  if (cov.rows() != noise_cov.rows() || cov.cols() != noise_cov.cols())
    throw Error(ErrorCode::ShapeMismatch, "signal and noise covariances differ in shape");
  const Eigen::Index n = cov.rows();
  // Regularize so the whitening transform exists even for rank-deficient noise.
  Eigen::MatrixXd noise = 0.5 * (noise_cov + noise_cov.transpose());
  const double scale = noise.trace() / static_cast<double>(std::max<Eigen::Index>(n, 1));
  noise.diagonal().array() += scale > 0.0 ? 1e-6 * scale : 1.0;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ns(noise);
  const Eigen::VectorXd root = ns.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd sqrt_n = ns.eigenvectors() * root.asDiagonal() * ns.eigenvectors().transpose();
  const Eigen::MatrixXd inv_sqrt_n =
      ns.eigenvectors() * root.cwiseInverse().asDiagonal() * ns.eigenvectors().transpose();

  const Eigen::MatrixXd whitened = inv_sqrt_n * cov * inv_sqrt_n;
  Eigen::VectorXd snr;
  const Eigen::MatrixXd w = top_eigenvectors(0.5 * (whitened + whitened.transpose()), d, &snr, rank_deficit);
  if (values != nullptr) *values = snr;
  if (w.cols() == 0) return Eigen::MatrixXd(n, 0);

  // Thin Q keeps the SNR order column by column.
  const Eigen::MatrixXd back = sqrt_n * w;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(back);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, back.cols());
  fix_signs(q);
  return q;
}

std::array<Eigen::MatrixXd, 2> difference_noise_covariances(const SliceStack& centered) {
  const auto k = static_cast<double>(centered.size());
  if (centered.size() < 2) throw Error(ErrorCode::TooFewPatches, "noise estimate needs at least 2 slices");
  const Eigen::Index n1 = centered.front().rows();
  const Eigen::Index n2 = centered.front().cols();
  Eigen::MatrixXd c1 = Eigen::MatrixXd::Zero(n1, n1);
  Eigen::MatrixXd c2 = Eigen::MatrixXd::Zero(n2, n2);
  for (std::size_t i = 0; i + 1 < centered.size(); ++i) {
    const Eigen::MatrixXd diff = centered[i + 1] - centered[i];
    c1.noalias() += diff * diff.transpose();
    c2.noalias() += diff.transpose() * diff;
  }
  // A difference carries twice the noise variance; K-1 differences stand in for K slices.
  const double scale = 0.5 * k / (k - 1.0);
  return {c1 * scale, c2 * scale};
}

namespace {

SliceStack centered_slices(const SliceStack& slices, Eigen::MatrixXd& mean) {
  const Eigen::Index n1 = slices.front().rows();
  const Eigen::Index n2 = slices.front().cols();
  SliceStack out;
  out.reserve(slices.size());
  mean = Eigen::MatrixXd::Zero(n1, n2);
  for (const auto& s : slices) {
    if (s.rows() != n1 || s.cols() != n2) throw Error(ErrorCode::ShapeMismatch, "slices differ in shape");
    out.push_back(remove_dc(s));
    mean += out.back();
  }
  mean /= static_cast<double>(slices.size());
  for (auto& s : out) s -= mean;
  return out;
}

}  // namespace

SourceModel learn_subspace(const SliceStack& slices, std::array<int, 3> dims, bool noise_adjusted,
                           std::vector<std::string>* warnings) {
  if (slices.size() < 2) throw Error(ErrorCode::TooFewPatches, "subspace learning needs at least 2 slices");
  const auto n1 = static_cast<int>(slices.front().rows());
  const auto n2 = static_cast<int>(slices.front().cols());
  const auto k = static_cast<int>(slices.size());
  if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1 || dims[0] > n1 || dims[1] > n2 || dims[2] > k)
    throw Error(ErrorCode::InvalidArgument, "feature dimensions must lie in [1, mode size]");

  SourceModel m;
  const SliceStack y = centered_slices(slices, m.mean);

  Eigen::MatrixXd c1 = Eigen::MatrixXd::Zero(n1, n1);
  Eigen::MatrixXd c2 = Eigen::MatrixXd::Zero(n2, n2);
  Eigen::MatrixXd c3(k, k);
  for (const auto& s : y) {
    c1.noalias() += s * s.transpose();
    c2.noalias() += s.transpose() * s;
  }
  for (int a = 0; a < k; ++a)
    for (int b = a; b < k; ++b) c3(a, b) = c3(b, a) = y[static_cast<std::size_t>(a)].cwiseProduct(y[static_cast<std::size_t>(b)]).sum();

  if (noise_adjusted) {
    const auto noise = difference_noise_covariances(y);
    m.u1 = snr_basis(c1, noise[0], dims[0], &m.eig1);
    m.u2 = snr_basis(c2, noise[1], dims[1], &m.eig2);
  } else {
    m.u1 = top_eigenvectors(c1, dims[0], &m.eig1);
    m.u2 = top_eigenvectors(c2, dims[1], &m.eig2);
  }
  m.u3 = top_eigenvectors(c3, dims[2], &m.eig3);
  note_deficit(warnings, "mode 1", dims[0], static_cast<int>(m.u1.cols()));
  note_deficit(warnings, "mode 2", dims[1], static_cast<int>(m.u2.cols()));
  note_deficit(warnings, "mode 3", dims[2], static_cast<int>(m.u3.cols()));
  return m;
}

SourceModel learn_vector_subspace(const SliceStack& slices, int d, std::vector<std::string>* warnings) {
  if (slices.size() < 2) throw Error(ErrorCode::TooFewPatches, "subspace learning needs at least 2 slices");
  SourceModel m;
  const SliceStack y = centered_slices(slices, m.mean);
  const Eigen::Index len = m.mean.size();
  const auto k = static_cast<Eigen::Index>(y.size());
  if (d < 1 || d > std::min(len, k)) throw Error(ErrorCode::InvalidArgument, "vector feature dimension out of range");

  Eigen::MatrixXd data(len, k);
  for (Eigen::Index j = 0; j < k; ++j) data.col(j) = y[static_cast<std::size_t>(j)].reshaped();
  // Gram-matrix route: K x K instead of len x len.
  Eigen::VectorXd evals;
  const Eigen::MatrixXd e = top_eigenvectors(data.transpose() * data, d, &evals);
  m.v = data * e;
  for (Eigen::Index j = 0; j < m.v.cols(); ++j) m.v.col(j).normalize();
  if (m.v.cols() == 0) m.v.resize(len, 0);
  m.eig1 = evals;
  note_deficit(warnings, "vector", d, static_cast<int>(m.v.cols()));
  return m;
}

double projection_residual(const Eigen::MatrixXd& x, const SourceModel& m) {
  const double norm = x.norm();
  if (norm == 0.0) return 0.0;
  if (m.vectorized()) {
    const Eigen::VectorXd flat = x.reshaped();
    const Eigen::VectorXd r = flat - m.v * (m.v.transpose() * flat);
    return r.norm() / norm;
  }
  if (x.rows() != m.u1.rows() || x.cols() != m.u2.rows())
    throw Error(ErrorCode::ShapeMismatch, "patch does not match the model's patch size");
  const Eigen::MatrixXd core = m.u1.transpose() * x * m.u2;
  return (x - m.u1 * core * m.u2.transpose()).norm() / norm;
}

double relative_residual(const Eigen::MatrixXd& patch, const SourceModel& m) {
  if (patch.rows() != m.mean.rows() || patch.cols() != m.mean.cols())
    throw Error(ErrorCode::ShapeMismatch, "patch does not match the model's patch size");
  const Eigen::MatrixXd flat = remove_dc(patch);
  const Eigen::MatrixXd centered = flat - m.mean;
  // A patch equal to the mean up to rounding has no direction to project.
  const double scale = std::max(flat.norm(), m.mean.norm());
  if (centered.norm() <= 1e-12 * scale) return 0.0;
  return projection_residual(centered, m);
}

}  // namespace salttex
