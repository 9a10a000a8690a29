#pragma once

#include "tae/common.hpp"
#include "tae/linear_tae.hpp"

#include <cstdint>
#include <vector>

namespace tae {

class Rng;

struct KMeansState {
  Matrix centers;           // k x d
  std::vector<int> labels;  // n, each < k
  double inertia = 0.0;     // sum of squared distances to assigned centers
  int iterations = 0;
  std::vector<double> objective_trace;
};

/// D^2 seeding: first center uniform, then each next center drawn with
/// probability proportional to its squared distance from the chosen set.
/// Coincident centers are allowed (with a warning) when all remaining
/// distances are zero.
Matrix kmeans_pp_init(const DataMatrix& X, Eigen::Index k, Rng& rng);
Matrix kmeans_pp_init(const DataMatrix& X, Eigen::Index k, std::uint64_t seed);

/// Lloyd iterations from the given centers until labels stop changing.
/// Empty clusters are re-seeded at the sample farthest from its center.
KMeansState kmeans_lloyd(const DataMatrix& X, const Matrix& centers, int max_iter = 300);

/// Best-of-`restarts` k-means++ runs (lowest inertia).
KMeansState kmeans(const DataMatrix& X, Eigen::Index k, std::uint64_t seed, int restarts = 1);

// Standard (single) linear autoencoder with tied decoder around the global mean.
struct LinearAEModel {
  Matrix U;       // h x d
  Matrix V;       // d x h
  Vector center;  // d
  double lambda = 0.1;
};

struct LinearAEResult {
  LinearAEModel model;
  std::vector<double> loss_trace;
  int epochs_run = 0;
  bool converged = false;
};

/// Gradient training of sum_i ||r_i - V U r_i||^2 + lambda ||U r_i||^2 with
/// r_i = x_i - mean. Uses the same step as the TAE weight update with a single
/// cluster holding every sample. `config.latent_dim` and `config.lambda`
/// are overridden by the explicit arguments.
LinearAEResult train_linear_ae(const DataMatrix& X, Eigen::Index h, double lambda,
                               const TrainConfig& config);

Matrix linear_ae_embed(const LinearAEModel& model, const DataMatrix& X);
DataMatrix linear_ae_reconstruct(const LinearAEModel& model, const DataMatrix& X);

enum class EmbeddingArch { linear, mlp };

/// Train a single autoencoder, embed the data, then cluster the embedding with
/// k-means++ and Lloyd iterations.
std::vector<int> ae_then_kmeans(const DataMatrix& X, Eigen::Index h, Eigen::Index k,
                                const TrainConfig& config,
                                EmbeddingArch arch = EmbeddingArch::linear);

// Gaussian mixture whose precision matrices are
//   Sigma_j^{-1} = (I - U_j^T U_j)^T (I - U_j^T U_j) + lambda U_j^T U_j
// for h x d encoders U_j with orthonormal rows.
struct GMMComponent {
  Vector mean;
  Matrix U;
  double weight = 0.0;
};

struct GMMState {
  std::vector<GMMComponent> components;
  double lambda = 0.1;
};

/// x^T Sigma^{-1} x = ||(I - U^T U) x||^2 + lambda ||U x||^2.
double lowrank_precision_apply(const Eigen::Ref<const Vector>& x, const Matrix& U,
                               double lambda);
Matrix lowrank_precision_matrix(const Matrix& U, double lambda);

/// log N(x; mean, Sigma). With include_log_det=false the normalizing
/// determinant is dropped, which turns -2x this into the TAE point cost.
double gmm_log_density(const Eigen::Ref<const Vector>& x, const GMMComponent& c, double lambda,
                       bool include_log_det = true);

/// Responsibilities, computed in log space.
AssignmentMatrix gmm_e_step(const DataMatrix& X, const GMMState& state,
                            bool include_log_det = true);

/// Weighted means, top-h eigenvectors of the weighted covariances, and
/// mixing weights proportional to responsibility mass.
GMMState gmm_m_step(const DataMatrix& X, const AssignmentMatrix& S, Eigen::Index h,
                    double lambda);

double gmm_log_likelihood(const DataMatrix& X, const GMMState& state);

struct EMResult {
  GMMState state;
  AssignmentMatrix responsibilities;
  std::vector<double> log_likelihood;  // [0] at initialization, then per iteration
};

/// k-means++ initialization, then `iterations` full E/M rounds.
EMResult run_em(const DataMatrix& X, Eigen::Index k, Eigen::Index h, double lambda,
                int iterations, std::uint64_t seed, bool include_log_det = true);

}  // namespace tae
