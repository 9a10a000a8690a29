#include "tae/rng.hpp"

#include <cmath>
#include <numbers>

namespace tae {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::index(std::size_t n) {
  auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return i < n ? i : n - 1;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(theta);
  has_spare_ = true;
  return radius * std::cos(theta);
}

Matrix Rng::gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = normal();
  return m;
}

Matrix Rng::orthonormal_rows(Eigen::Index h, Eigen::Index d) {
  if (h > d) throw InputError("cannot draw " + std::to_string(h) +
                              " orthonormal rows in dimension " +
                              std::to_string(d));
  for (;;) {
    Matrix m = gaussian_matrix(h, d);
    if (orthonormalize_rows(m)) return m;
  }
}

bool orthonormalize_rows(Matrix& m, double rank_tol) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double scale = m.row(r).norm();
    // two passes keep the basis orthogonal to working precision
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index q = 0; q < r; ++q)
        m.row(r) -= m.row(r).dot(m.row(q)) * m.row(q);
    const double norm = m.row(r).norm();
    if (!(norm > rank_tol * std::max(1.0, scale))) return false;
    m.row(r) /= norm;
  }
  return true;
}

}  // namespace tae
