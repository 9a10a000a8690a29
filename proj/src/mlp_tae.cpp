#include "tae/mlp_tae.hpp"

#include "tae/baselines.hpp"
#include "tae/rng.hpp"

#include <cmath>
#include <optional>

namespace tae {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::identity: return "identity";
  }
  return "relu";
}

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  if (name == "identity") return Activation::identity;
  throw InputError("unknown activation '" + name + "' (expected relu, tanh or identity)");
}

namespace {

Vector activate(const Vector& v, Activation a) {
  switch (a) {
    case Activation::relu: return v.cwiseMax(0.0);
    case Activation::tanh: return v.array().tanh().matrix();
    case Activation::identity: return v;
  }
  return v;
}

// Derivative evaluated at the pre-activation; relu'(0) = 0.
Vector activate_derivative(const Vector& pre, Activation a) {
  switch (a) {
    case Activation::relu: return (pre.array() > 0.0).cast<double>().matrix();
    case Activation::tanh: return (1.0 - pre.array().tanh().square()).matrix();
    case Activation::identity: return Vector::Ones(pre.size());
  }
  return Vector::Ones(pre.size());
}

template <typename AE, typename Fn>
void for_each_tensor(AE& ae, Fn&& fn) {
  fn(ae.W1.data(), ae.W1.size());
  fn(ae.b1.data(), ae.b1.size());
  fn(ae.W2.data(), ae.W2.size());
  fn(ae.b2.data(), ae.b2.size());
  fn(ae.W3.data(), ae.W3.size());
  fn(ae.b3.data(), ae.b3.size());
  fn(ae.W4.data(), ae.W4.size());
  fn(ae.b4.data(), ae.b4.size());
}

}  // namespace

Eigen::Index MLPAutoencoder::parameter_count() const {
  return W1.size() + b1.size() + W2.size() + b2.size() + W3.size() + b3.size() + W4.size() +
         b4.size();
}

void validate_mlp(const MLPAutoencoder& ae) {
  const Eigen::Index d = ae.input_dim(), m = ae.hidden_dim(), h = ae.latent_dim();
  if (d < 1 || m < 1 || h < 1) throw InputError("MLP layer sizes must be >= 1");
  expect_dim("b1 length", m, ae.b1.size());
  expect_dim("W2 columns", m, ae.W2.cols());
  expect_dim("b2 length", h, ae.b2.size());
  expect_dim("W3 rows", m, ae.W3.rows());
  expect_dim("W3 columns", h, ae.W3.cols());
  expect_dim("b3 length", m, ae.b3.size());
  expect_dim("W4 rows", d, ae.W4.rows());
  expect_dim("W4 columns", m, ae.W4.cols());
  expect_dim("b4 length", d, ae.b4.size());
}

Vector flatten(const MLPAutoencoder& ae) {
  Vector out(ae.parameter_count());
  Eigen::Index offset = 0;
  for_each_tensor(ae, [&](const double* p, Eigen::Index size) {
    out.segment(offset, size) = Eigen::Map<const Vector>(p, size);
    offset += size;
  });
  return out;
}

void unflatten(MLPAutoencoder& ae, const Vector& params) {
  expect_dim("parameter vector length", ae.parameter_count(), params.size());
  Eigen::Index offset = 0;
  for_each_tensor(ae, [&](double* p, Eigen::Index size) {
    Eigen::Map<Vector>(p, size) = params.segment(offset, size);
    offset += size;
  });
}

MLPAutoencoder zeros_like(const MLPAutoencoder& ae) {
  MLPAutoencoder z = ae;
  for_each_tensor(z, [](double* p, Eigen::Index size) { Eigen::Map<Vector>(p, size).setZero(); });
  return z;
}

MLPAutoencoder random_mlp(Eigen::Index d, Eigen::Index m, Eigen::Index h, Activation act,
                          Rng& rng) {
  MLPAutoencoder ae;
  ae.activation = act;
  ae.W1 = rng.gaussian_matrix(m, d) / std::sqrt(static_cast<double>(d));
  ae.b1 = Vector::Zero(m);
  ae.W2 = rng.gaussian_matrix(h, m) / std::sqrt(static_cast<double>(m));
  ae.b2 = Vector::Zero(h);
  ae.W3 = rng.gaussian_matrix(m, h) / std::sqrt(static_cast<double>(h));
  ae.b3 = Vector::Zero(m);
  ae.W4 = rng.gaussian_matrix(d, m) / std::sqrt(static_cast<double>(m));
  ae.b4 = Vector::Zero(d);
  return ae;
}

MLPAutoencoder collapse_linear(const ClusterLinearAE& linear) {
  const Eigen::Index d = linear.C.size(), h = linear.U.rows();
  MLPAutoencoder ae;
  ae.activation = Activation::identity;
  ae.W1 = Matrix::Identity(d, d);
  ae.b1 = Vector::Zero(d);
  ae.W2 = linear.U;
  ae.b2 = Vector::Zero(h);
  ae.W3 = linear.V;
  ae.b3 = Vector::Zero(d);
  ae.W4 = Matrix::Identity(d, d);
  ae.b4 = Vector::Zero(d);
  return ae;
}

TensorizedMLP collapse_linear(const TAEModel& model) {
  validate_model(model);
  TensorizedMLP out;
  out.lambda = model.lambda;
  out.seed = model.seed;
  out.s_update = model.s_update;
  for (const auto& cl : model.clusters) {
    out.clusters.push_back(collapse_linear(cl));
    out.centers.push_back(cl.C);
  }
  return out;
}

MLPForward mlp_forward(const Eigen::Ref<const Vector>& x, const MLPAutoencoder& ae) {
  expect_dim("MLP input", ae.input_dim(), x.size());
  MLPForward out;
  out.latent = ae.W2 * activate(ae.W1 * x + ae.b1, ae.activation) + ae.b2;
  out.recon = ae.W4 * activate(ae.W3 * out.latent + ae.b3, ae.activation) + ae.b4;
  return out;
}

void validate_model(const TensorizedMLP& model) {
  if (model.clusters.empty()) throw InputError("model has no clusters (k must be >= 1)");
  expect_dim("center count", model.k(), static_cast<Eigen::Index>(model.centers.size()));
  for (std::size_t j = 0; j < model.clusters.size(); ++j) {
    const auto& ae = model.clusters[j];
    validate_mlp(ae);
    expect_dim("input dimension", model.d(), ae.input_dim());
    expect_dim("latent dimension", model.h(), ae.latent_dim());
    expect_dim("center length", model.d(), model.centers[j].size());
  }
}

Matrix mlp_cost_matrix(const DataMatrix& X, const TensorizedMLP& model) {
  validate_model(model);
  expect_dim("features (columns of X)", model.d(), X.cols());
  Matrix costs(model.k(), X.rows());
  for (Eigen::Index j = 0; j < model.k(); ++j) {
    const auto& ae = model.clusters[static_cast<std::size_t>(j)];
    const auto& c = model.centers[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const Vector r = X.row(i).transpose() - c;
      const auto f = mlp_forward(r, ae);
      costs(j, i) = (r - f.recon).squaredNorm() + model.lambda * f.latent.squaredNorm();
    }
  }
  return costs;
}

double tensorized_mlp_loss(const DataMatrix& X, const AssignmentMatrix& S,
                           const TensorizedMLP& model) {
  expect_dim("clusters (rows of S)", model.k(), S.rows());
  expect_dim("samples (columns of S)", X.rows(), S.cols());
  const Matrix costs = mlp_cost_matrix(X, model);
  double total = 0.0;
  for (Eigen::Index j = 0; j < costs.rows(); ++j)
    for (Eigen::Index i = 0; i < costs.cols(); ++i) total += S(j, i) * costs(j, i);
  return total;
}

std::vector<MLPAutoencoder> mlp_backward(const DataMatrix& X, const AssignmentMatrix& S,
                                         const TensorizedMLP& model) {
  validate_model(model);
  expect_dim("features (columns of X)", model.d(), X.cols());
  expect_dim("clusters (rows of S)", model.k(), S.rows());
  expect_dim("samples (columns of S)", X.rows(), S.cols());
  std::vector<MLPAutoencoder> grads;
  for (Eigen::Index j = 0; j < model.k(); ++j) {
    const auto& ae = model.clusters[static_cast<std::size_t>(j)];
    const auto& c = model.centers[static_cast<std::size_t>(j)];
    MLPAutoencoder g = zeros_like(ae);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double s = S(j, i);
      if (s == 0.0) continue;
      const Vector r = X.row(i).transpose() - c;
      const Vector pre1 = ae.W1 * r + ae.b1;
      const Vector a1 = activate(pre1, ae.activation);
      const Vector z = ae.W2 * a1 + ae.b2;
      const Vector pre3 = ae.W3 * z + ae.b3;
      const Vector a3 = activate(pre3, ae.activation);
      const Vector y = ae.W4 * a3 + ae.b4;

      const Vector dy = -2.0 * s * (r - y);
      g.W4.noalias() += dy * a3.transpose();
      g.b4 += dy;
      const Vector dpre3 = (ae.W4.transpose() * dy).cwiseProduct(activate_derivative(pre3, ae.activation));
      g.W3.noalias() += dpre3 * z.transpose();
      g.b3 += dpre3;
      const Vector dz = ae.W3.transpose() * dpre3 + 2.0 * s * model.lambda * z;
      g.W2.noalias() += dz * a1.transpose();
      g.b2 += dz;
      const Vector dpre1 = (ae.W2.transpose() * dz).cwiseProduct(activate_derivative(pre1, ae.activation));
      g.W1.noalias() += dpre1 * r.transpose();
      g.b1 += dpre1;
    }
    if (!flatten(g).allFinite()) throw NumericalDivergence(j, "non-finite MLP gradient");
    grads.push_back(std::move(g));
  }
  return grads;
}

std::pair<TensorizedMLP, AssignmentMatrix> initialize_mlp(const DataMatrix& X, Eigen::Index k,
                                                          const MLPTrainConfig& config) {
  validate_config(config.base);
  if (k < 1 || k > X.rows())
    throw InputError("k=" + std::to_string(k) + " must lie in [1, n=" +
                     std::to_string(X.rows()) + "]");
  const Eigen::Index d = X.cols();
  const Eigen::Index m = config.hidden > 0 ? config.hidden : 2 * d;
  Rng rng(config.base.seed);
  const KMeansState km = kmeans_lloyd(X, kmeans_pp_init(X, k, rng));
  TensorizedMLP model;
  model.lambda = config.base.lambda;
  model.seed = config.base.seed;
  model.s_update = config.base.s_update;
  AssignmentMatrix S = AssignmentMatrix::Zero(k, X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) S(km.labels[static_cast<std::size_t>(i)], i) = 1.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    model.clusters.push_back(random_mlp(d, m, config.base.latent_dim, config.activation, rng));
    model.centers.push_back(km.centers.row(j).transpose());
  }
  return {std::move(model), std::move(S)};
}

MLPTrainResult train_mlp_from(const DataMatrix& X, TensorizedMLP model, AssignmentMatrix S,
                              const MLPTrainConfig& config) {
  const TrainConfig& base = config.base;
  validate_config(base);
  validate_model(model);
  validate_assignment(S);
  Rng reseed_rng(base.seed ^ 0x9E3779B97F4A7C15ULL);
  const double inv_n = 1.0 / static_cast<double>(X.rows());

  MLPTrainResult result;
  double previous = tensorized_mlp_loss(X, S, model);
  result.loss_trace.push_back(previous);
  if (base.observer) base.observer(0, previous);
  for (int epoch = 1; epoch <= base.epochs; ++epoch) {
    if (base.learning_rate > 0.0) {
      const auto grads = mlp_backward(X, S, model);
      for (std::size_t j = 0; j < grads.size(); ++j)
        unflatten(model.clusters[j],
                  flatten(model.clusters[j]) - base.learning_rate * inv_n * flatten(grads[j]));
    }
    for (Eigen::Index j = 0; j < model.k(); ++j)
      if (S.row(j).sum() > 0.0) model.centers[static_cast<std::size_t>(j)] = center_update(X, S, j);
    result.pre_assignment_loss.push_back(tensorized_mlp_loss(X, S, model));

    const Matrix costs = mlp_cost_matrix(X, model);
    AssignmentMatrix next = base.s_update == SUpdate::lloyd
                                ? lloyd_assign(costs)
                                : projected_gradient_assign(S, costs, base.s_learning_rate);
    // empty clusters: re-centre on the costliest movable sample, fresh weights
    for (Eigen::Index j = 0; j < next.rows(); ++j) {
      if (next.row(j).sum() > 0.0) continue;
      const Vector mass = next.rowwise().sum();
      const Vector expected = (next.array() * costs.array()).colwise().sum().transpose();
      Eigen::Index pick = -1;
      for (Eigen::Index i = 0; i < next.cols(); ++i) {
        bool movable = true;
        for (Eigen::Index o = 0; o < next.rows(); ++o)
          if (next(o, i) > 0.0 && !(mass[o] - next(o, i) > 0.0)) movable = false;
        if (movable && (pick < 0 || expected[i] > expected[pick])) pick = i;
      }
      if (pick < 0) continue;
      next.col(pick).setZero();
      next(j, pick) = 1.0;
      model.centers[static_cast<std::size_t>(j)] = X.row(pick).transpose();
      model.clusters[static_cast<std::size_t>(j)] =
          random_mlp(model.d(), model.m(), model.h(), model.clusters[0].activation, reseed_rng);
      ++result.reseeds;
    }
    const bool changed = (next - S).cwiseAbs().maxCoeff() > 0.0;
    S = std::move(next);

    const double loss = tensorized_mlp_loss(X, S, model);
    if (base.observer) base.observer(epoch, loss);
    if (!std::isfinite(loss)) {
      Eigen::Index bad = 0;
      for (Eigen::Index j = model.k() - 1; j >= 0; --j)
        if (!flatten(model.clusters[static_cast<std::size_t>(j)]).allFinite()) bad = j;
      throw NumericalDivergence(bad, "MLP loss became non-finite at epoch " + std::to_string(epoch));
    }
    result.loss_trace.push_back(loss);
    result.epochs_run = epoch;
    const bool settled = base.s_update != SUpdate::lloyd || !changed;
    if (settled && std::abs(loss - previous) < base.tol * std::max(1.0, previous)) {
      result.converged = true;
      break;
    }
    previous = loss;
  }
  result.model = std::move(model);
  result.S = std::move(S);
  return result;
}

MLPTrainResult train_mlp(const DataMatrix& X, Eigen::Index k, const MLPTrainConfig& config) {
  validate_config(config.base);
  std::optional<MLPTrainResult> best;
  for (int r = 0; r < config.base.restarts; ++r) {
    MLPTrainConfig run = config;
    run.base.seed = restart_seed(config.base.seed, r);
    auto [model, S] = initialize_mlp(X, k, run);
    MLPTrainResult result = train_mlp_from(X, std::move(model), std::move(S), run);
    result.model.seed = config.base.seed;
    if (!best || result.loss_trace.back() < best->loss_trace.back()) best = std::move(result);
  }
  return std::move(*best);
}

Assignment mlp_assign_new_point(const Eigen::Ref<const Vector>& x, const TensorizedMLP& model) {
  validate_model(model);
  expect_dim("features", model.d(), x.size());
  Assignment a;
  a.costs.resize(model.k());
  for (Eigen::Index j = 0; j < model.k(); ++j) {
    const Vector r = x - model.centers[static_cast<std::size_t>(j)];
    const auto f = mlp_forward(r, model.clusters[static_cast<std::size_t>(j)]);
    a.costs[j] = (r - f.recon).squaredNorm() + model.lambda * f.latent.squaredNorm();
  }
  a.cluster = argmin_lowest(a.costs);
  return a;
}

Vector mlp_reconstruct(const Eigen::Ref<const Vector>& x, const TensorizedMLP& model) {
  const auto j = static_cast<std::size_t>(mlp_assign_new_point(x, model).cluster);
  return mlp_forward(x - model.centers[j], model.clusters[j]).recon + model.centers[j];
}

DataMatrix mlp_reconstruct_all(const DataMatrix& X, const TensorizedMLP& model) {
  DataMatrix out(X.rows(), X.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    out.row(i) = mlp_reconstruct(X.row(i).transpose(), model).transpose();
  return out;
}

}  // namespace tae
