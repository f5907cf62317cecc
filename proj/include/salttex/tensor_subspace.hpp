#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace salttex {

/// A stack of n1 x n2 slices along mode 3.
using SliceStack = std::vector<Eigen::MatrixXd>;

/// Mode-wise bases for one patch source (amplitude or GoT).
struct SourceModel {
  Eigen::MatrixXd u1;    // n1 x d1
  Eigen::MatrixXd u2;    // n2 x d2
  Eigen::MatrixXd u3;    // K x d3
  Eigen::MatrixXd mean;  // n1 x n2, mean of the DC-removed training slices
  Eigen::MatrixXd v;     // (n1*n2) x d, vectorized-feature mode only
  Eigen::VectorXd eig1, eig2, eig3;

  bool vectorized() const { return v.size() > 0; }
};

/// Slice minus its own mean value.
Eigen::MatrixXd remove_dc(const Eigen::MatrixXd& slice);

/// Top-d eigenvectors of a symmetric matrix, eigenvalues descending. Columns
/// are sign-normalized so their largest-magnitude entry is positive. When the
/// numerical rank is below d the basis is truncated and `rank_deficit` set.
Eigen::MatrixXd top_eigenvectors(const Eigen::MatrixXd& cov, int d, Eigen::VectorXd* values = nullptr,
                                 bool* rank_deficit = nullptr);

/// Top-d directions ordered by signal-to-noise ratio: eigenvectors of the
/// noise-whitened covariance mapped back to data space and orthonormalized.
Eigen::MatrixXd snr_basis(const Eigen::MatrixXd& cov, const Eigen::MatrixXd& noise_cov, int d,
                          Eigen::VectorXd* values = nullptr, bool* rank_deficit = nullptr);

/// Noise covariances for modes 1 and 2 from first differences along mode 3,
/// scaled to match the signal covariances' sum over K slices.
std::array<Eigen::MatrixXd, 2> difference_noise_covariances(const SliceStack& centered);

/// Mode-wise PCA of the DC-removed, mean-centered stack. Warnings about
/// rank-deficient modes are appended to `warnings`.
SourceModel learn_subspace(const SliceStack& slices, std::array<int, 3> dims, bool noise_adjusted,
                           std::vector<std::string>* warnings = nullptr);

/// Plain PCA of the vectorized DC-removed slices, d components.
SourceModel learn_vector_subspace(const SliceStack& slices, int d, std::vector<std::string>* warnings = nullptr);

/// ||X - U1 U1^T X U2 U2^T||_F / ||X||_F for an already centered slice
/// (0 when X is 0). Vector models project onto span(v) instead.
double projection_residual(const Eigen::MatrixXd& centered, const SourceModel& m);

/// Centers a raw patch against the model, then projection_residual.
double relative_residual(const Eigen::MatrixXd& patch, const SourceModel& m);

}  // namespace salttex
