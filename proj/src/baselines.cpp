#include "tae/baselines.hpp"

#include "tae/mlp_tae.hpp"
#include "tae/rng.hpp"
#include "tae/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace tae {

Matrix kmeans_pp_init(const DataMatrix& X, Eigen::Index k, Rng& rng) {
  const Eigen::Index n = X.rows();
  if (k < 1 || k > n)
    throw InputError("k=" + std::to_string(k) + " must lie in [1, n=" + std::to_string(n) + "]");
  Matrix centers(k, X.cols());
  centers.row(0) = X.row(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n))));
  Vector dist2 = (X.rowwise() - centers.row(0)).rowwise().squaredNorm();
  bool warned = false;
  for (Eigen::Index c = 1; c < k; ++c) {
    const double total = dist2.sum();
    Eigen::Index pick = 0;
    if (!(total > 0.0)) {
      if (!warned) warn("k-means++: all remaining points coincide with chosen centers");
      warned = true;
      pick = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
    } else {
      const double target = rng.uniform() * total;
      double cumulative = 0.0;
      pick = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (dist2[i] <= 0.0) continue;
        cumulative += dist2[i];
        pick = i;
        if (cumulative > target) break;
      }
    }
    centers.row(c) = X.row(pick);
    dist2 = dist2.cwiseMin((X.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

Matrix kmeans_pp_init(const DataMatrix& X, Eigen::Index k, std::uint64_t seed) {
  Rng rng(seed);
  return kmeans_pp_init(X, k, rng);
}

KMeansState kmeans_lloyd(const DataMatrix& X, const Matrix& centers, int max_iter) {
  expect_dim("features (center columns)", X.cols(), centers.cols());
  const Eigen::Index n = X.rows(), k = centers.rows();
  KMeansState state;
  state.centers = centers;
  state.labels.assign(static_cast<std::size_t>(n), -1);
  Vector dist2(n);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    double objective = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vector d2 = (state.centers.rowwise() - X.row(i)).rowwise().squaredNorm();
      const auto best = static_cast<int>(argmin_lowest(d2));
      dist2[i] = d2[best];
      objective += d2[best];
      if (state.labels[static_cast<std::size_t>(i)] != best) changed = true;
      state.labels[static_cast<std::size_t>(i)] = best;
    }
    state.objective_trace.push_back(objective);
    state.inertia = objective;
    state.iterations = iter + 1;
    if (!changed && iter > 0) break;

    Matrix sums = Matrix::Zero(k, X.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(state.labels[static_cast<std::size_t>(i)]) += X.row(i);
      ++counts[static_cast<std::size_t>(state.labels[static_cast<std::size_t>(i)])];
    }
    for (Eigen::Index j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) {
        state.centers.row(j) = sums.row(j) / counts[static_cast<std::size_t>(j)];
        continue;
      }
      // empty: move to the farthest point whose own cluster keeps a member
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        const int owner = state.labels[static_cast<std::size_t>(i)];
        if (owner < 0 || counts[static_cast<std::size_t>(owner)] < 2) continue;
        if (far < 0 || dist2[i] > dist2[far]) far = i;
      }
      if (far < 0) continue;
      --counts[static_cast<std::size_t>(state.labels[static_cast<std::size_t>(far)])];
      state.labels[static_cast<std::size_t>(far)] = static_cast<int>(j);
      counts[static_cast<std::size_t>(j)] = 1;
      dist2[far] = 0.0;
      state.centers.row(j) = X.row(far);
    }
  }
  return state;
}

KMeansState kmeans(const DataMatrix& X, Eigen::Index k, std::uint64_t seed, int restarts) {
  Rng rng(seed);
  KMeansState best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, restarts); ++r) {
    KMeansState s = kmeans_lloyd(X, kmeans_pp_init(X, k, rng));
    if (s.inertia < best.inertia) best = std::move(s);
  }
  return best;
}

LinearAEResult train_linear_ae(const DataMatrix& X, Eigen::Index h, double lambda,
                               const TrainConfig& config) {
  validate_config(config);
  if (h < 1 || h > X.cols())
    throw InputError("latent dimension h=" + std::to_string(h) + " must lie in [1, d]");
  if (X.rows() < 1) throw InputError("no samples");
  Rng rng(config.seed);
  TAEModel single;
  single.lambda = lambda;
  single.seed = config.seed;
  ClusterLinearAE ae;
  ae.U = rng.orthonormal_rows(h, X.cols());
  ae.V = ae.U.transpose();
  ae.C = X.colwise().mean().transpose();
  single.clusters.push_back(std::move(ae));
  const AssignmentMatrix S = AssignmentMatrix::Ones(1, X.rows());

  LinearAEResult result;
  double previous = tae_loss(X, S, single);
  result.loss_trace.push_back(previous);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    single = gradient_step_weights(X, S, single, config.learning_rate);
    const double loss = tae_loss(X, S, single);
    if (!std::isfinite(loss)) throw NumericalDivergence(0, "linear AE loss became non-finite");
    result.loss_trace.push_back(loss);
    result.epochs_run = epoch;
    if (std::abs(loss - previous) < config.tol * std::max(1.0, previous)) {
      result.converged = true;
      break;
    }
    previous = loss;
  }
  const auto& trained = single.clusters.front();
  result.model = LinearAEModel{trained.U, trained.V, trained.C, lambda};
  return result;
}

Matrix linear_ae_embed(const LinearAEModel& model, const DataMatrix& X) {
  expect_dim("features", model.center.size(), X.cols());
  return (X.rowwise() - model.center.transpose()) * model.U.transpose();
}

DataMatrix linear_ae_reconstruct(const LinearAEModel& model, const DataMatrix& X) {
  return (linear_ae_embed(model, X) * model.V.transpose()).rowwise() + model.center.transpose();
}

std::vector<int> ae_then_kmeans(const DataMatrix& X, Eigen::Index h, Eigen::Index k,
                                const TrainConfig& config, EmbeddingArch arch) {
  Matrix embedding;
  if (arch == EmbeddingArch::linear) {
    embedding = linear_ae_embed(train_linear_ae(X, h, config.lambda, config).model, X);
  } else {
    MLPTrainConfig mc;
    mc.base = config;
    mc.base.latent_dim = h;
    const auto trained = train_mlp(X, 1, mc);
    embedding.resize(X.rows(), h);
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      embedding.row(i) =
          mlp_forward(X.row(i).transpose() - trained.model.centers.front(),
                      trained.model.clusters.front())
              .latent.transpose();
  }
  return kmeans(embedding, k, config.seed + 1).labels;
}

double lowrank_precision_apply(const Eigen::Ref<const Vector>& x, const Matrix& U,
                               double lambda) {
  expect_dim("features", U.cols(), x.size());
  const Vector z = U * x;
  return (x - U.transpose() * z).squaredNorm() + lambda * z.squaredNorm();
}

Matrix lowrank_precision_matrix(const Matrix& U, double lambda) {
  const Eigen::Index d = U.cols();
  const Matrix residual = Matrix::Identity(d, d) - U.transpose() * U;
  return residual.transpose() * residual + lambda * U.transpose() * U;
}

double gmm_log_density(const Eigen::Ref<const Vector>& x, const GMMComponent& c, double lambda,
                       bool include_log_det) {
  const double q = lowrank_precision_apply(x - c.mean, c.U, lambda);
  double log_density = -0.5 * q;
  if (include_log_det) {
    // log det Sigma = -h log(lambda)
    const auto d = static_cast<double>(c.mean.size());
    const auto h = static_cast<double>(c.U.rows());
    log_density += -0.5 * d * std::log(2.0 * std::numbers::pi) + 0.5 * h * std::log(lambda);
  }
  return log_density;
}

namespace {

Matrix weighted_log_densities(const DataMatrix& X, const GMMState& state, bool include_log_det) {
  const auto k = static_cast<Eigen::Index>(state.components.size());
  Matrix logp(k, X.rows());
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto& c = state.components[static_cast<std::size_t>(j)];
    const double log_weight =
        c.weight > 0.0 ? std::log(c.weight) : -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      logp(j, i) = log_weight + gmm_log_density(X.row(i).transpose(), c, state.lambda,
                                                include_log_det);
  }
  return logp;
}

double log_sum_exp(const Eigen::Ref<const Vector>& v) {
  const double top = v.maxCoeff();
  if (!std::isfinite(top)) return top;
  return top + std::log((v.array() - top).exp().sum());
}

}  // namespace

AssignmentMatrix gmm_e_step(const DataMatrix& X, const GMMState& state, bool include_log_det) {
  if (state.components.empty()) throw InputError("mixture has no components");
  expect_dim("features", state.components.front().mean.size(), X.cols());
  const Matrix logp = weighted_log_densities(X, state, include_log_det);
  AssignmentMatrix S(logp.rows(), logp.cols());
  for (Eigen::Index i = 0; i < logp.cols(); ++i) {
    const double norm = log_sum_exp(logp.col(i));
    S.col(i) = (logp.col(i).array() - norm).exp().matrix();
    S.col(i) /= S.col(i).sum();
  }
  return S;
}

GMMState gmm_m_step(const DataMatrix& X, const AssignmentMatrix& S, Eigen::Index h,
                    double lambda) {
  expect_dim("samples (columns of S)", X.rows(), S.cols());
  if (h < 1 || h > X.cols()) throw InputError("latent dimension must lie in [1, d]");
  GMMState state;
  state.lambda = lambda;
  const double n = static_cast<double>(X.rows());
  for (Eigen::Index j = 0; j < S.rows(); ++j) {
    GMMComponent c;
    c.mean = center_update(X, S, j);
    c.U = top_eigenvectors(weighted_covariance(X, S, c.mean, j), h);
    c.weight = S.row(j).sum() / n;
    state.components.push_back(std::move(c));
  }
  return state;
}

double gmm_log_likelihood(const DataMatrix& X, const GMMState& state) {
  const Matrix logp = weighted_log_densities(X, state, true);
  double total = 0.0;
  for (Eigen::Index i = 0; i < logp.cols(); ++i) total += log_sum_exp(logp.col(i));
  return total;
}

EMResult run_em(const DataMatrix& X, Eigen::Index k, Eigen::Index h, double lambda,
                int iterations, std::uint64_t seed, bool include_log_det) {
  const KMeansState km = kmeans(X, k, seed);
  AssignmentMatrix S = AssignmentMatrix::Zero(k, X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) S(km.labels[static_cast<std::size_t>(i)], i) = 1.0;
  EMResult result;
  result.state = gmm_m_step(X, S, h, lambda);
  result.log_likelihood.push_back(gmm_log_likelihood(X, result.state));
  for (int it = 0; it < iterations; ++it) {
    S = gmm_e_step(X, result.state, include_log_det);
    result.state = gmm_m_step(X, S, h, lambda);
    result.log_likelihood.push_back(gmm_log_likelihood(X, result.state));
  }
  result.responsibilities = gmm_e_step(X, result.state, include_log_det);
  return result;
}

}  // namespace tae
