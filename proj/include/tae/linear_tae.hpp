#pragma once

#include "tae/common.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tae {

enum class SUpdate { lloyd, projected_gradient };

std::string to_string(SUpdate s);
SUpdate parse_s_update(const std::string& name);

// One cluster's linear autoencoder: encode z = U (x - C), decode V z + C.
struct ClusterLinearAE {
  Matrix U;  // h x d
  Matrix V;  // d x h
  Vector C;  // d
};

struct TAEModel {
  std::vector<ClusterLinearAE> clusters;
  double lambda = 0.1;
  std::uint64_t seed = 0;
  SUpdate s_update = SUpdate::lloyd;

  Eigen::Index k() const { return static_cast<Eigen::Index>(clusters.size()); }
  Eigen::Index d() const { return clusters.empty() ? 0 : clusters.front().C.size(); }
  Eigen::Index h() const { return clusters.empty() ? 0 : clusters.front().U.rows(); }
};

// Throws DimensionMismatch / InputError on inconsistent shapes or k < 1.
void validate_model(const TAEModel& model);
// Warning text when lambda lies outside (0, 1], empty otherwise.
std::string lambda_range_warning(double lambda);
// Throws InputError unless every entry is >= 0 and columns sum to 1 within tol.
void validate_assignment(const AssignmentMatrix& S, double tol = 1e-9);

struct TrainConfig {
  int epochs = 300;
  double learning_rate = 0.1;    // step on the per-sample mean loss
  double s_learning_rate = 1.0;  // projected-gradient S step
  double lambda = 0.1;
  Eigen::Index latent_dim = 1;
  SUpdate s_update = SUpdate::lloyd;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  // Independent k-means++ initializations; the run with the lowest final loss wins.
  int restarts = 1;
  // Called with (epoch, loss) for the initial state (epoch 0) and after every
  // epoch of every restart, before the divergence check.
  std::function<void(int, double)> observer;
};

// Seed used by restart r (restart 0 uses the configured seed itself).
std::uint64_t restart_seed(std::uint64_t seed, int restart);

void validate_config(const TrainConfig& config);

/// Per-point reconstruction + latent penalty of x under one cluster.
double point_cost(const Eigen::Ref<const Vector>& x, const ClusterLinearAE& ae,
                  double lambda);

/// k x n matrix of per-point costs; entry (j, i) is the bracketed cost of
/// sample i under cluster j. This is also d(loss)/dS.
Matrix cost_matrix(const DataMatrix& X, const TAEModel& model);

/// Assignment-weighted sum of per-point costs.
double tae_loss(const DataMatrix& X, const AssignmentMatrix& S, const TAEModel& model);

/// Weighted mean of the samples under row j of S. Throws EmptyCluster when the
/// row has no mass.
Vector center_update(const DataMatrix& X, const AssignmentMatrix& S, Eigen::Index j);

/// Euclidean gradient of tae_loss with respect to U_j, with V_j tied to U_j^T
/// and C_j held fixed.
Matrix encoder_gradient(const DataMatrix& X, const AssignmentMatrix& S,
                        const TAEModel& model, Eigen::Index j);

/// One full-batch weight step.
///
/// Each U_j moves along the encoder gradient of the mean loss projected onto
/// the tangent space of matrices with orthonormal rows, then is mapped back by
/// the polar retraction. V_j is re-tied to U_j^T and C_j is reset to the
/// weighted mean of its assigned samples. With lr == 0 only the centers move.
TAEModel gradient_step_weights(const DataMatrix& X, const AssignmentMatrix& S,
                               const TAEModel& model, double lr);

/// Hard assignment to the cheapest cluster, ties to the lowest index.
AssignmentMatrix lloyd_assign(const Matrix& costs);
AssignmentMatrix s_update_lloyd(const DataMatrix& X, const TAEModel& model);

/// Euclidean projection onto the probability simplex (sort and threshold).
Vector simplex_project(const Vector& v);

/// Column-wise S - lr * costs, projected back onto the simplex.
AssignmentMatrix projected_gradient_assign(const AssignmentMatrix& S,
                                           const Matrix& costs, double lr);
AssignmentMatrix s_update_projected_gradient(const DataMatrix& X,
                                             const AssignmentMatrix& S,
                                             const TAEModel& model, double lr);

struct TrainResult {
  TAEModel model;
  AssignmentMatrix S;
  // loss_trace[0] is the loss at initialization, then one value per epoch
  // after the assignment update.
  std::vector<double> loss_trace;
  // Loss after the weight/center step of each epoch, before the S update.
  std::vector<double> pre_assignment_loss;
  int epochs_run = 0;
  bool converged = false;
  int reseeds = 0;
};

/// k-means++ seeding followed by Lloyd iterations, random orthonormal
/// encoders, tied decoders. Returns the model and the binary assignment.
std::pair<TAEModel, AssignmentMatrix> initialize_tae(const DataMatrix& X,
                                                     Eigen::Index k,
                                                     const TrainConfig& config);

/// Alternating weight/center steps and assignment updates from a given start.
TrainResult train_from(const DataMatrix& X, TAEModel model, AssignmentMatrix S,
                       const TrainConfig& config);

/// Best of `config.restarts` runs of initialize_tae + train_from.
TrainResult train(const DataMatrix& X, Eigen::Index k, const TrainConfig& config);

struct Assignment {
  Eigen::Index cluster = 0;
  Vector costs;
};

Assignment assign_new_point(const Eigen::Ref<const Vector>& x, const TAEModel& model);

enum class ReconstructionMode {
  projection,  // V U (x - C) + C
  residual,    // (I - V U)(x - C) + C, the alternative form kept for comparison
};

Vector reconstruct(const Eigen::Ref<const Vector>& x, const TAEModel& model,
                   ReconstructionMode mode = ReconstructionMode::projection);

DataMatrix reconstruct_all(const DataMatrix& X, const TAEModel& model,
                           ReconstructionMode mode = ReconstructionMode::projection);

std::vector<int> hard_labels(const AssignmentMatrix& S);

}  // namespace tae
