#pragma once

// Independent reference computations used by the unit and acceptance suites.
// Nothing here calls into the library's numerical code paths.

#include "tae/linear_tae.hpp"
#include "tae/mlp_tae.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using tae::Matrix;
using tae::Vector;

struct TestRng {
  explicit TestRng(std::uint64_t seed) : engine(seed) {}
  double normal() { return gauss(engine); }
  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }
  Matrix matrix(Eigen::Index r, Eigen::Index c);
  Matrix symmetric(Eigen::Index d);
  Matrix stochastic(Eigen::Index k, Eigen::Index n);  // columns on the simplex
  std::mt19937_64 engine;
  std::normal_distribution<double> gauss{0.0, 1.0};
};

// Plain loops over entries.
Matrix weighted_covariance(const Matrix& X, const Matrix& S, const Vector& c, Eigen::Index j);
double mse(const Matrix& a, const Matrix& b);
double tae_loss(const Matrix& X, const Matrix& S, const tae::TAEModel& model);
double point_cost(const Matrix& X, Eigen::Index i, const tae::ClusterLinearAE& ae,
                  double lambda);
tae::MLPForward mlp_forward(const Vector& x, const tae::MLPAutoencoder& ae);
double mlp_loss(const Matrix& X, const Matrix& S, const tae::TensorizedMLP& model);

// Pair counting over all n(n-1)/2 pairs.
double ari_pairs(const std::vector<int>& a, const std::vector<int>& b);

// Minimum of tae_loss over every binary assignment (k^n of them).
double best_binary_assignment_loss(const Matrix& costs);

// Projection onto the simplex by enumerating every support set and solving
// the equality-constrained problem on it.
Vector simplex_projection_by_support(const Vector& v);
// Smallest squared distance from v to a point of the simplex grid with spacing 1/steps.
double simplex_grid_min_distance2(const Vector& v, int steps);

double central_difference(const std::function<double(const Vector&)>& f, const Vector& p,
                          Eigen::Index i, double step);

struct GradientCheck {
  double max_relative_error = 0.0;
  int instances = 0;
};

// Relative error ||g - g_fd|| / max(||g_fd||, floor) over all entries.
double relative_error(const Vector& analytic, const Vector& numeric, double floor = 1e-8);

GradientCheck check_linear_encoder_gradients(int instances, std::uint64_t seed);
GradientCheck check_assignment_gradients(int instances, std::uint64_t seed);
GradientCheck check_mlp_gradients(int instances, std::uint64_t seed, tae::Activation act);

// Exact D^2 probability that the second center is x[target] given the first.
double d2_second_center_probability(const std::vector<double>& x, std::size_t first,
                                    std::size_t target);

// Largest principal angle between the row spans of two orthonormal-row matrices,
// via singular values of A B^T (Eigen SVD).
double principal_angle_svd(const Matrix& A, const Matrix& B);

}  // namespace oracle
