#pragma once

#include "tae/common.hpp"

#include <cstdint>
#include <random>

namespace tae {

// Reproducible random source.
//
// Bits come from std::mt19937_64 (a standardized, bit-exact engine). Uniform
// doubles take the top 53 bits; normals use the Box-Muller transform with the
// sine branch cached. Neither step relies on the unspecified std::*_distribution
// algorithms, so streams are identical across standard libraries.
// Algorithm tag: "mt19937_64/u53/box-muller v1".
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64/u53/box-muller v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform();
  // Uniform integer on [0, n).
  std::size_t index(std::size_t n);
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols);
  // h x d matrix with orthonormal rows: Gaussian draw + Gram-Schmidt.
  Matrix orthonormal_rows(Eigen::Index h, Eigen::Index d);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Orthonormalize the rows of `m` in place (modified Gram-Schmidt).
// Returns false if the rows are numerically rank deficient.
bool orthonormalize_rows(Matrix& m, double rank_tol = 1e-12);

}  // namespace tae
