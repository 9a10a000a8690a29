#include "tae/linear_tae.hpp"

#include "tae/baselines.hpp"
#include "tae/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tae {

std::string to_string(SUpdate s) {
  return s == SUpdate::lloyd ? "lloyd" : "pgd";
}

SUpdate parse_s_update(const std::string& name) {
  if (name == "lloyd") return SUpdate::lloyd;
  if (name == "pgd" || name == "projected_gradient") return SUpdate::projected_gradient;
  throw InputError("unknown S update '" + name + "' (expected lloyd or pgd)");
}

void validate_model(const TAEModel& model) {
  if (model.clusters.empty()) throw InputError("model has no clusters (k must be >= 1)");
  const Eigen::Index d = model.d(), h = model.h();
  if (d < 1) throw InputError("model feature dimension must be >= 1");
  if (h < 1 || h > d)
    throw InputError("latent dimension h=" + std::to_string(h) + " must lie in [1, d=" +
                     std::to_string(d) + "]");
  for (const auto& cl : model.clusters) {
    expect_dim("center length", d, cl.C.size());
    expect_dim("encoder rows", h, cl.U.rows());
    expect_dim("encoder columns", d, cl.U.cols());
    expect_dim("decoder rows", d, cl.V.rows());
    expect_dim("decoder columns", h, cl.V.cols());
  }
}

std::string lambda_range_warning(double lambda) {
  if (lambda > 0.0 && lambda <= 1.0) return {};
  return "lambda=" + std::to_string(lambda) +
         " lies outside (0, 1]; the per-cluster optimum guarantees do not apply";
}

void validate_assignment(const AssignmentMatrix& S, double tol) {
  for (Eigen::Index i = 0; i < S.cols(); ++i) {
    if ((S.col(i).array() < 0.0).any())
      throw InputError("assignment column " + std::to_string(i) + " has a negative entry");
    if (std::abs(S.col(i).sum() - 1.0) > tol)
      throw InputError("assignment column " + std::to_string(i) + " does not sum to 1");
  }
}

void validate_config(const TrainConfig& config) {
  if (config.epochs < 0) throw InputError("epochs must be >= 0");
  if (!(config.learning_rate >= 0.0)) throw InputError("learning rate must be >= 0");
  if (!(config.s_learning_rate > 0.0)) throw InputError("S learning rate must be > 0");
  if (!(config.tol >= 0.0)) throw InputError("tolerance must be >= 0");
  if (config.latent_dim < 1) throw InputError("latent dimension must be >= 1");
  if (config.restarts < 1) throw InputError("restarts must be >= 1");
}

double point_cost(const Eigen::Ref<const Vector>& x, const ClusterLinearAE& ae,
                  double lambda) {
  const Vector r = x - ae.C;
  const Vector z = ae.U * r;
  return (r - ae.V * z).squaredNorm() + lambda * z.squaredNorm();
}

namespace {

void check_inputs(const DataMatrix& X, const AssignmentMatrix& S, const TAEModel& model) {
  validate_model(model);
  expect_dim("features (columns of X)", model.d(), X.cols());
  expect_dim("clusters (rows of S)", model.k(), S.rows());
  expect_dim("samples (columns of S)", X.rows(), S.cols());
}

// Per-cluster costs for all samples at once: column i of the result is the
// vector of costs of sample i.
Vector cluster_costs(const DataMatrix& X, const ClusterLinearAE& ae, double lambda) {
  const Matrix R = X.rowwise() - ae.C.transpose();  // n x d
  const Matrix Z = R * ae.U.transpose();             // n x h
  const Matrix E = R - Z * ae.V.transpose();         // n x d
  return E.rowwise().squaredNorm() + lambda * Z.rowwise().squaredNorm();
}

Matrix polar_retract(const Matrix& A, Eigen::Index cluster) {
  const Matrix gram = A * A.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const Vector& vals = eig.eigenvalues();
  if (!(vals.minCoeff() > 0.0) || !vals.allFinite())
    throw NumericalDivergence(cluster, "encoder lost rank during retraction");
  const Matrix inv_sqrt = eig.eigenvectors() * vals.cwiseSqrt().cwiseInverse().asDiagonal() *
                          eig.eigenvectors().transpose();
  return inv_sqrt * A;
}

}  // namespace

Matrix cost_matrix(const DataMatrix& X, const TAEModel& model) {
  validate_model(model);
  expect_dim("features (columns of X)", model.d(), X.cols());
  Matrix costs(model.k(), X.rows());
  for (Eigen::Index j = 0; j < model.k(); ++j)
    costs.row(j) =
        cluster_costs(X, model.clusters[static_cast<std::size_t>(j)], model.lambda).transpose();
  return costs;
}

double tae_loss(const DataMatrix& X, const AssignmentMatrix& S, const TAEModel& model) {
  check_inputs(X, S, model);
  const Matrix costs = cost_matrix(X, model);
  double total = 0.0;
  // fixed summation order: clusters outer, samples inner
  for (Eigen::Index j = 0; j < costs.rows(); ++j)
    for (Eigen::Index i = 0; i < costs.cols(); ++i) total += S(j, i) * costs(j, i);
  return total;
}

Vector center_update(const DataMatrix& X, const AssignmentMatrix& S, Eigen::Index j) {
  expect_dim("samples (columns of S)", X.rows(), S.cols());
  if (j < 0 || j >= S.rows()) throw DimensionMismatch("cluster index", S.rows(), j);
  const double mass = S.row(j).sum();
  if (!(mass > 0.0)) throw EmptyCluster(j);
  return (S.row(j) * X).transpose() / mass;
}

Matrix encoder_gradient(const DataMatrix& X, const AssignmentMatrix& S,
                        const TAEModel& model, Eigen::Index j) {
  check_inputs(X, S, model);
  const auto& ae = model.clusters[static_cast<std::size_t>(j)];
  const Matrix R = X.rowwise() - ae.C.transpose();              // rows r_i
  const Matrix Z = R * ae.U.transpose();                        // rows z_i = U r_i
  const Matrix E = R - Z * ae.U;                                // rows e_i = r_i - U^T z_i
  const Matrix UE = E * ae.U.transpose();                       // rows U e_i
  const Matrix WZ = Z.array().colwise() * S.row(j).transpose().array();
  const Matrix WUE = UE.array().colwise() * S.row(j).transpose().array();
  // d/dU sum_i s_i (||e_i||^2 + lambda ||z_i||^2)
  //   = sum_i s_i (-2 z_i e_i^T - 2 (U e_i) r_i^T + 2 lambda z_i r_i^T)
  return -2.0 * WZ.transpose() * E - 2.0 * WUE.transpose() * R +
         2.0 * model.lambda * WZ.transpose() * R;
}

TAEModel gradient_step_weights(const DataMatrix& X, const AssignmentMatrix& S,
                               const TAEModel& model, double lr) {
  check_inputs(X, S, model);
  if (!(lr >= 0.0)) throw InputError("learning rate must be >= 0");
  TAEModel next = model;
  for (Eigen::Index j = 0; j < model.k(); ++j) {
    const auto& ae = model.clusters[static_cast<std::size_t>(j)];
    auto& out = next.clusters[static_cast<std::size_t>(j)];
    if (lr > 0.0 && S.row(j).sum() > 0.0) {
      const Matrix grad = encoder_gradient(X, S, model, j);
      if (!grad.allFinite()) throw NumericalDivergence(j, "non-finite encoder gradient");
      // Scale by the cluster's total scatter so the step is invariant to the
      // data scale and cluster mass.
      const Matrix R = X.rowwise() - ae.C.transpose();
      const double scatter = (R.rowwise().squaredNorm().transpose().array() *
                              S.row(j).array()).sum();
      if (scatter > 0.0) {
        const Matrix sym = 0.5 * (grad * ae.U.transpose() + ae.U * grad.transpose());
        const Matrix tangent = grad - sym * ae.U;
        out.U = polar_retract(ae.U - (lr / scatter) * tangent, j);
      }
    }
    out.V = out.U.transpose();
    if (S.row(j).sum() > 0.0) out.C = center_update(X, S, j);
  }
  return next;
}

AssignmentMatrix lloyd_assign(const Matrix& costs) {
  AssignmentMatrix S = AssignmentMatrix::Zero(costs.rows(), costs.cols());
  for (Eigen::Index i = 0; i < costs.cols(); ++i) S(argmin_lowest(costs.col(i)), i) = 1.0;
  return S;
}

AssignmentMatrix s_update_lloyd(const DataMatrix& X, const TAEModel& model) {
  return lloyd_assign(cost_matrix(X, model));
}

Vector simplex_project(const Vector& v) {
  const Eigen::Index k = v.size();
  if (k == 0) return v;
  if (!v.allFinite()) throw InputError("simplex_project: non-finite input");
  std::vector<double> sorted(v.data(), v.data() + k);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0, threshold = 0.0;
  for (Eigen::Index r = 0; r < k; ++r) {
    cumulative += sorted[static_cast<std::size_t>(r)];
    const double t = (cumulative - 1.0) / static_cast<double>(r + 1);
    if (sorted[static_cast<std::size_t>(r)] - t > 0.0) threshold = t;
  }
  Vector out = (v.array() - threshold).cwiseMax(0.0);
  const double sum = out.sum();
  if (sum > 0.0) {
    out /= sum;
  } else {
    out.setZero();
    out[argmin_lowest(-v)] = 1.0;
  }
  return out;
}

AssignmentMatrix projected_gradient_assign(const AssignmentMatrix& S, const Matrix& costs,
                                           double lr) {
  expect_dim("clusters (rows of S)", costs.rows(), S.rows());
  expect_dim("samples (columns of S)", costs.cols(), S.cols());
  AssignmentMatrix out(S.rows(), S.cols());
  for (Eigen::Index i = 0; i < S.cols(); ++i)
    out.col(i) = simplex_project(S.col(i) - lr * costs.col(i));
  return out;
}

AssignmentMatrix s_update_projected_gradient(const DataMatrix& X, const AssignmentMatrix& S,
                                             const TAEModel& model, double lr) {
  check_inputs(X, S, model);
  return projected_gradient_assign(S, cost_matrix(X, model), lr);
}

std::pair<TAEModel, AssignmentMatrix> initialize_tae(const DataMatrix& X, Eigen::Index k,
                                                     const TrainConfig& config) {
  validate_config(config);
  if (k < 1 || k > X.rows())
    throw InputError("k=" + std::to_string(k) + " must lie in [1, n=" +
                     std::to_string(X.rows()) + "]");
  if (config.latent_dim > X.cols())
    throw InputError("latent dimension exceeds feature dimension");
  Rng rng(config.seed);
  const KMeansState km = kmeans_lloyd(X, kmeans_pp_init(X, k, rng));
  TAEModel model;
  model.lambda = config.lambda;
  model.seed = config.seed;
  model.s_update = config.s_update;
  AssignmentMatrix S = AssignmentMatrix::Zero(k, X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) S(km.labels[static_cast<std::size_t>(i)], i) = 1.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    ClusterLinearAE ae;
    ae.U = rng.orthonormal_rows(config.latent_dim, X.cols());
    ae.V = ae.U.transpose();
    ae.C = km.centers.row(j).transpose();
    model.clusters.push_back(std::move(ae));
  }
  return {std::move(model), std::move(S)};
}

namespace {

// Re-seed every cluster left without mass: centre it on the costliest sample
// that can move without emptying another cluster and draw a fresh encoder.
int repair_empty_clusters(const DataMatrix& X, TAEModel& model, AssignmentMatrix& S,
                          Rng& rng) {
  int repaired = 0;
  for (Eigen::Index j = 0; j < S.rows(); ++j) {
    if (S.row(j).sum() > 0.0) continue;
    const Matrix costs = cost_matrix(X, model);
    const Vector mass = S.rowwise().sum();
    const Vector expected = (S.array() * costs.array()).colwise().sum().transpose();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(X.rows()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return expected[a] > expected[b];
    });
    for (Eigen::Index i : order) {
      bool movable = true;
      for (Eigen::Index other = 0; other < S.rows(); ++other)
        if (S(other, i) > 0.0 && !(mass[other] - S(other, i) > 0.0)) movable = false;
      if (!movable) continue;
      S.col(i).setZero();
      S(j, i) = 1.0;
      auto& ae = model.clusters[static_cast<std::size_t>(j)];
      ae.C = X.row(i).transpose();
      ae.U = rng.orthonormal_rows(model.h(), model.d());
      ae.V = ae.U.transpose();
      ++repaired;
      break;
    }
  }
  return repaired;
}

}  // namespace

TrainResult train_from(const DataMatrix& X, TAEModel model, AssignmentMatrix S,
                       const TrainConfig& config) {
  validate_config(config);
  check_inputs(X, S, model);
  validate_assignment(S);
  Rng reseed_rng(config.seed ^ 0x9E3779B97F4A7C15ULL);

  TrainResult result;
  double previous = tae_loss(X, S, model);
  result.loss_trace.push_back(previous);
  if (config.observer) config.observer(0, previous);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    model = gradient_step_weights(X, S, model, config.learning_rate);
    result.pre_assignment_loss.push_back(tae_loss(X, S, model));

    AssignmentMatrix next = config.s_update == SUpdate::lloyd
                                ? s_update_lloyd(X, model)
                                : s_update_projected_gradient(X, S, model, config.s_learning_rate);
    result.reseeds += repair_empty_clusters(X, model, next, reseed_rng);
    const bool changed = (next - S).cwiseAbs().maxCoeff() > 0.0;
    S = std::move(next);

    const double loss = tae_loss(X, S, model);
    if (config.observer) config.observer(epoch, loss);
    if (!std::isfinite(loss)) {
      Eigen::Index bad = 0;
      for (Eigen::Index j = 0; j < model.k(); ++j)
        if (!model.clusters[static_cast<std::size_t>(j)].U.allFinite()) bad = j;
      throw NumericalDivergence(bad, "loss became non-finite at epoch " + std::to_string(epoch));
    }
    result.loss_trace.push_back(loss);
    result.epochs_run = epoch;
    const bool settled = config.s_update != SUpdate::lloyd || !changed;
    if (settled && std::abs(loss - previous) < config.tol * std::max(1.0, previous)) {
      result.converged = true;
      break;
    }
    previous = loss;
  }
  result.model = std::move(model);
  result.S = std::move(S);
  return result;
}

std::uint64_t restart_seed(std::uint64_t seed, int restart) {
  return seed + static_cast<std::uint64_t>(restart) * 0x9E3779B97F4A7C15ULL;
}

TrainResult train(const DataMatrix& X, Eigen::Index k, const TrainConfig& config) {
  validate_config(config);
  std::optional<TrainResult> best;
  for (int r = 0; r < config.restarts; ++r) {
    TrainConfig run = config;
    run.seed = restart_seed(config.seed, r);
    auto [model, S] = initialize_tae(X, k, run);
    TrainResult result = train_from(X, std::move(model), std::move(S), run);
    result.model.seed = config.seed;
    if (!best || result.loss_trace.back() < best->loss_trace.back()) best = std::move(result);
  }
  return std::move(*best);
}

Assignment assign_new_point(const Eigen::Ref<const Vector>& x, const TAEModel& model) {
  validate_model(model);
  expect_dim("features", model.d(), x.size());
  Assignment a;
  a.costs.resize(model.k());
  for (Eigen::Index j = 0; j < model.k(); ++j)
    a.costs[j] = point_cost(x, model.clusters[static_cast<std::size_t>(j)], model.lambda);
  a.cluster = argmin_lowest(a.costs);
  return a;
}

Vector reconstruct(const Eigen::Ref<const Vector>& x, const TAEModel& model,
                   ReconstructionMode mode) {
  const auto& ae = model.clusters[static_cast<std::size_t>(assign_new_point(x, model).cluster)];
  const Vector r = x - ae.C;
  const Vector projected = ae.V * (ae.U * r);
  return mode == ReconstructionMode::projection ? Vector(projected + ae.C)
                                                : Vector(r - projected + ae.C);
}

DataMatrix reconstruct_all(const DataMatrix& X, const TAEModel& model, ReconstructionMode mode) {
  DataMatrix out(X.rows(), X.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    out.row(i) = reconstruct(X.row(i).transpose(), model, mode).transpose();
  return out;
}

std::vector<int> hard_labels(const AssignmentMatrix& S) {
  std::vector<int> labels(static_cast<std::size_t>(S.cols()));
  for (Eigen::Index i = 0; i < S.cols(); ++i)
    labels[static_cast<std::size_t>(i)] = static_cast<int>(argmin_lowest(-S.col(i)));
  return labels;
}

}  // namespace tae
