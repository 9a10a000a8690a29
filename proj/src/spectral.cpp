#include "tae/spectral.hpp"

#include "tae/linear_tae.hpp"
#include "tae/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace tae {

Matrix weighted_covariance(const DataMatrix& X, const AssignmentMatrix& S,
                           const Vector& center, Eigen::Index j) {
  expect_dim("samples (columns of S)", X.rows(), S.cols());
  expect_dim("features (center length)", X.cols(), center.size());
  if (j < 0 || j >= S.rows()) throw DimensionMismatch("cluster index", S.rows(), j);
  const Eigen::Index d = X.cols();
  Matrix centered = X.rowwise() - center.transpose();
  Matrix weighted = centered.array().colwise() * S.row(j).transpose().array();
  Matrix cov = weighted.transpose() * centered;
  // exact symmetry
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = a + 1; b < d; ++b) {
      const double m = 0.5 * (cov(a, b) + cov(b, a));
      cov(a, b) = m;
      cov(b, a) = m;
    }
  return cov;
}

EigenDecomposition sym_eigendecomp(const Matrix& A, double symmetry_tol) {
  if (A.rows() != A.cols())
    throw InputError("sym_eigendecomp: matrix is " + std::to_string(A.rows()) +
                     "x" + std::to_string(A.cols()) + ", not square");
  const Eigen::Index n = A.rows();
  const double scale = std::max(1.0, A.norm());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > symmetry_tol * scale)
    throw InputError("sym_eigendecomp: matrix is not symmetric");

  Matrix a = 0.5 * (A + A.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double eps = std::numeric_limits<double>::epsilon();

  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) s += 2.0 * a(p, q) * a(p, q);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100; ++sweep) {
    if (off_norm() <= eps * scale * 1e-2) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < std::numeric_limits<double>::min()) continue;
        // Symmetric Schur decomposition of the (p, q) 2x2 block.
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Eigen::Index r = 0; r < n; ++r) {
          const double arp = a(r, p), arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
          const double apr = a(p, r), aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index r = 0; r < n; ++r) {
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x) > a(y, y); });
  EigenDecomposition out{Vector(n), Matrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto src = order[static_cast<std::size_t>(i)];
    out.values[i] = a(src, src);
    out.vectors.col(i) = v.col(src);
  }
  return out;
}

Matrix top_eigenvectors(const Matrix& A, Eigen::Index h) {
  if (h < 1 || h > A.rows())
    throw InputError("top_eigenvectors: h=" + std::to_string(h) +
                     " outside [1, " + std::to_string(A.rows()) + "]");
  const auto eig = sym_eigendecomp(A);
  return eig.vectors.leftCols(h).transpose();
}

double principal_angle(const Matrix& U1, const Matrix& U2) {
  expect_dim("principal_angle: ambient dimension", U1.cols(), U2.cols());
  expect_dim("principal_angle: subspace dimension", U1.rows(), U2.rows());
  Matrix q1 = U1, q2 = U2;
  if (!orthonormalize_rows(q1, 1e-10) || !orthonormalize_rows(q2, 1e-10))
    throw InputError("principal_angle: rank-deficient basis");
  // sin^2 of the largest angle is the top eigenvalue of Q1 (I - Q2^T Q2) Q1^T.
  const Matrix residual = q1 - (q1 * q2.transpose()) * q2;
  const Matrix gram = residual * residual.transpose();
  const double sin2 = std::clamp(sym_eigendecomp(gram).values[0], 0.0, 1.0);
  return std::atan2(std::sqrt(sin2), std::sqrt(1.0 - sin2));
}

SpectralReport verify_tae_optimum(const DataMatrix& X, const AssignmentMatrix& S,
                                  const TAEModel& model,
                                  const SpectralThresholds& thresholds) {
  validate_model(model);
  expect_dim("clusters (rows of S)", model.k(), S.rows());
  expect_dim("samples (columns of S)", X.rows(), S.cols());
  expect_dim("features", model.d(), X.cols());

  SpectralReport report;
  report.thresholds = thresholds;
  for (Eigen::Index i = 0; i < S.cols(); ++i)
    for (Eigen::Index j = 0; j < S.rows(); ++j) {
      const double s = S(j, i);
      report.s_binariness = std::max(report.s_binariness, std::min(std::abs(s), std::abs(1.0 - s)));
    }

  bool pass = report.s_binariness < thresholds.s_binariness;
  const Eigen::Index h = model.h();
  for (Eigen::Index j = 0; j < model.k(); ++j) {
    const auto& cl = model.clusters[static_cast<std::size_t>(j)];
    ClusterSpectralReport r;
    r.mass = S.row(j).sum();
    r.s_binariness = 0.0;
    for (Eigen::Index i = 0; i < S.cols(); ++i)
      r.s_binariness = std::max(r.s_binariness,
                                std::min(std::abs(S(j, i)), std::abs(1.0 - S(j, i))));
    r.tie_residual = (cl.V - cl.U.transpose()).norm();
    r.orthonormality_residual =
        (cl.U * cl.U.transpose() - Matrix::Identity(h, h)).norm();
    r.empty = !(r.mass > 0.0);
    if (!r.empty) {
      r.center_residual = (cl.C - center_update(X, S, j)).norm();
      const Matrix cov = weighted_covariance(X, S, cl.C, j);
      const auto eig = sym_eigendecomp(cov);
      r.eigenvalues = eig.values;
      try {
        r.subspace_angle = principal_angle(cl.U, eig.vectors.leftCols(h).transpose());
      } catch (const InputError&) {
        r.subspace_angle = std::numbers::pi / 2;  // encoder collapsed
      }
    }
    pass = pass && r.tie_residual <= thresholds.tie_residual &&
           r.orthonormality_residual < thresholds.orthonormality_residual;
    if (!r.empty)
      pass = pass && r.center_residual < thresholds.center_residual &&
             r.subspace_angle < thresholds.subspace_angle;
    report.clusters.push_back(std::move(r));
  }
  report.pass = pass;
  return report;
}

}  // namespace tae
