#pragma once

#include "tae/common.hpp"
#include "tae/linear_tae.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tae {

class Rng;

enum class Activation { relu, tanh, identity };

std::string to_string(Activation a);
Activation parse_activation(const std::string& name);

// One-hidden-layer autoencoder:
//   encoder  z = W2 act(W1 x + b1) + b2
//   decoder  y = W4 act(W3 z + b3) + b4
struct MLPAutoencoder {
  Matrix W1;  // m x d
  Vector b1;  // m
  Matrix W2;  // h x m
  Vector b2;  // h
  Matrix W3;  // m x h
  Vector b3;  // m
  Matrix W4;  // d x m
  Vector b4;  // d
  Activation activation = Activation::relu;

  Eigen::Index input_dim() const { return W1.cols(); }
  Eigen::Index hidden_dim() const { return W1.rows(); }
  Eigen::Index latent_dim() const { return W2.rows(); }
  Eigen::Index parameter_count() const;
};

void validate_mlp(const MLPAutoencoder& ae);

// Flat parameter vector in the order W1, b1, W2, b2, W3, b3, W4, b4 (matrices
// column-major).
Vector flatten(const MLPAutoencoder& ae);
void unflatten(MLPAutoencoder& ae, const Vector& params);

MLPAutoencoder zeros_like(const MLPAutoencoder& ae);

// Weights ~ N(0, 1/fan_in), biases zero.
MLPAutoencoder random_mlp(Eigen::Index d, Eigen::Index m, Eigen::Index h, Activation act,
                          Rng& rng);

// Identity activation, m = d, W1 = W4 = I, W2 = U, W3 = V, zero biases: the
// network computes exactly the linear encoder/decoder pair.
MLPAutoencoder collapse_linear(const ClusterLinearAE& ae);

struct MLPForward {
  Vector latent;
  Vector recon;
};

MLPForward mlp_forward(const Eigen::Ref<const Vector>& x, const MLPAutoencoder& ae);

struct TensorizedMLP {
  std::vector<MLPAutoencoder> clusters;
  std::vector<Vector> centers;
  double lambda = 0.1;
  std::uint64_t seed = 0;
  SUpdate s_update = SUpdate::lloyd;

  Eigen::Index k() const { return static_cast<Eigen::Index>(clusters.size()); }
  Eigen::Index d() const { return clusters.empty() ? 0 : clusters.front().input_dim(); }
  Eigen::Index h() const { return clusters.empty() ? 0 : clusters.front().latent_dim(); }
  Eigen::Index m() const { return clusters.empty() ? 0 : clusters.front().hidden_dim(); }
};

void validate_model(const TensorizedMLP& model);

TensorizedMLP collapse_linear(const TAEModel& model);

/// k x n per-point costs ||r - f(g(r))||^2 + lambda ||g(r)||^2, r = x - C_j.
Matrix mlp_cost_matrix(const DataMatrix& X, const TensorizedMLP& model);

/// Assignment-weighted sum of per-point costs, using the model centers.
double tensorized_mlp_loss(const DataMatrix& X, const AssignmentMatrix& S,
                           const TensorizedMLP& model);

/// Gradients of tensorized_mlp_loss with respect to every weight and bias of
/// every cluster network (centers held fixed), in MLPAutoencoder layout.
std::vector<MLPAutoencoder> mlp_backward(const DataMatrix& X, const AssignmentMatrix& S,
                                         const TensorizedMLP& model);

struct MLPTrainConfig {
  TrainConfig base;
  Eigen::Index hidden = 0;  // 0 means 2 * d
  Activation activation = Activation::relu;
};

struct MLPTrainResult {
  TensorizedMLP model;
  AssignmentMatrix S;
  std::vector<double> loss_trace;
  std::vector<double> pre_assignment_loss;
  int epochs_run = 0;
  bool converged = false;
  int reseeds = 0;
};

std::pair<TensorizedMLP, AssignmentMatrix> initialize_mlp(const DataMatrix& X, Eigen::Index k,
                                                          const MLPTrainConfig& config);

/// Per epoch: one gradient step on the mean loss for all networks, centers to
/// the weighted means, then the configured assignment update.
MLPTrainResult train_mlp_from(const DataMatrix& X, TensorizedMLP model, AssignmentMatrix S,
                              const MLPTrainConfig& config);

/// Best of `config.base.restarts` runs by final loss.
MLPTrainResult train_mlp(const DataMatrix& X, Eigen::Index k, const MLPTrainConfig& config);

Assignment mlp_assign_new_point(const Eigen::Ref<const Vector>& x, const TensorizedMLP& model);
Vector mlp_reconstruct(const Eigen::Ref<const Vector>& x, const TensorizedMLP& model);
DataMatrix mlp_reconstruct_all(const DataMatrix& X, const TensorizedMLP& model);

}  // namespace tae
