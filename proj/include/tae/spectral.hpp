#pragma once

#include "tae/common.hpp"

#include <vector>

namespace tae {

struct TAEModel;

/// Scatter of the samples around `center`, weighted by row `j` of `S`:
/// sum_i S(j,i) (x_i - center)(x_i - center)^T.
Matrix weighted_covariance(const DataMatrix& X, const AssignmentMatrix& S,
                           const Vector& center, Eigen::Index j);

struct EigenDecomposition {
  Vector values;   // descending
  Matrix vectors;  // column i pairs with values[i]
};

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// Rotations sweep every off-diagonal pair until the off-diagonal Frobenius
/// mass falls below machine precision relative to ||A||. Eigenvalues come out
/// sorted descending; eigenvectors are orthonormal columns.
///
/// Throws InputError if `A` is not square or differs from its transpose by
/// more than `symmetry_tol * max(1, ||A||)`.
EigenDecomposition sym_eigendecomp(const Matrix& A, double symmetry_tol = 1e-9);

/// Top-h eigenvectors of a symmetric matrix, returned as the rows of an h x d
/// matrix (the encoder layout).
Matrix top_eigenvectors(const Matrix& A, Eigen::Index h);

/// Largest principal angle (radians) between the row spans of two h x d
/// matrices. Rows need not be orthonormal but must be linearly independent.
double principal_angle(const Matrix& U1, const Matrix& U2);

struct ClusterSpectralReport {
  bool empty = false;
  double mass = 0.0;
  double s_binariness = 0.0;
  double center_residual = 0.0;
  double tie_residual = 0.0;
  double orthonormality_residual = 0.0;
  double subspace_angle = 0.0;
  Vector eigenvalues;
};

struct SpectralThresholds {
  double s_binariness = 1e-3;
  double center_residual = 1e-5;
  double tie_residual = 1e-12;
  double orthonormality_residual = 1e-2;
  double subspace_angle = 0.05;
};

/// Residuals of a trained linear TAE against the closed-form optimum:
/// binary assignments, centers at the weighted means, tied decoder,
/// orthonormal encoder rows spanning the top eigenspace of each cluster's
/// weighted covariance.
struct SpectralReport {
  std::vector<ClusterSpectralReport> clusters;
  double s_binariness = 0.0;  // max over all columns
  SpectralThresholds thresholds;
  bool pass = false;
};

SpectralReport verify_tae_optimum(const DataMatrix& X, const AssignmentMatrix& S,
                                  const TAEModel& model,
                                  const SpectralThresholds& thresholds = {});

}  // namespace tae
