#include "oracles.hpp"

#include "tae/baselines.hpp"
#include "tae/datasets.hpp"
#include "tae/metrics.hpp"
#include "tae/rng.hpp"
#include "tae/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace tae;

namespace {

DataMatrix column(std::initializer_list<double> v) {
  DataMatrix X(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double x : v) X(i++, 0) = x;
  return X;
}

double brute_force_inertia(const DataMatrix& X, int k) {
  const auto n = X.rows();
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  double best = 1e300;
  while (true) {
    double total = 0.0;
    for (int c = 0; c < k; ++c) {
      Vector mean = Vector::Zero(X.cols());
      int count = 0;
      for (Eigen::Index i = 0; i < n; ++i)
        if (labels[static_cast<std::size_t>(i)] == c) {
          mean += X.row(i).transpose();
          ++count;
        }
      if (count == 0) continue;
      mean /= count;
      for (Eigen::Index i = 0; i < n; ++i)
        if (labels[static_cast<std::size_t>(i)] == c) total += (X.row(i).transpose() - mean).squaredNorm();
    }
    best = std::min(best, total);
    std::size_t pos = 0;
    while (pos < labels.size() && ++labels[pos] == k) labels[pos++] = 0;
    if (pos == labels.size()) break;
  }
  return best;
}

std::vector<int> argmax_labels(const AssignmentMatrix& S) { return hard_labels(S); }

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("k-means++ seeding") {
  const DataMatrix X = column({0, 1, 10, 11, 20});
  SUBCASE("k = n picks every point") {
    const Matrix c = kmeans_pp_init(X, 5, 3);
    std::set<double> picked(c.data(), c.data() + c.size());
    CHECK(picked.size() == 5);
  }
  SUBCASE("k = 1 picks a data point") {
    const Matrix c = kmeans_pp_init(X, 1, 4);
    CHECK((X.array() == c(0, 0)).any());
  }
  SUBCASE("invalid k") {
    CHECK_THROWS_AS(kmeans_pp_init(X, 6, 1), InputError);
    CHECK_THROWS_AS(kmeans_pp_init(X, 0, 1), InputError);
  }
}

TEST_CASE("D^2 weighting frequency") {
  const std::vector<double> pts{0.0, 1.0, 10.0};
  const DataMatrix X = column({0.0, 1.0, 10.0});
  int first_zero = 0, second_ten = 0;
  for (std::uint64_t seed = 0; seed < 10000 * 3 && first_zero < 10000; ++seed) {
    const Matrix c = kmeans_pp_init(X, 2, seed);
    if (c(0, 0) != 0.0) continue;
    ++first_zero;
    second_ten += c(1, 0) == 10.0;
  }
  REQUIRE(first_zero == 10000);
  const double expected = oracle::d2_second_center_probability(pts, 0, 2);
  CHECK(expected == doctest::Approx(100.0 / 101.0));
  CHECK(std::abs(second_ten / 10000.0 - expected) <= 0.02);
}

TEST_CASE("coincident data warns") {
  std::vector<std::string> messages;
  const auto previous = set_warning_sink([&](const std::string& m) { messages.push_back(m); });
  const Matrix c = kmeans_pp_init(column({2, 2, 2}), 2, 1);
  set_warning_sink(previous);
  CHECK(c(0, 0) == 2.0);
  CHECK(c(1, 0) == 2.0);
  CHECK(messages.size() == 1);
}

TEST_CASE("Lloyd iterations") {
  const DataMatrix X = column({0, 1, 10, 11});
  const KMeansState s = kmeans_lloyd(X, column({0, 1}));
  std::set<double> centers{s.centers(0, 0), s.centers(1, 0)};
  CHECK(centers == std::set<double>{0.5, 10.5});
  for (std::size_t t = 1; t < s.objective_trace.size(); ++t)
    CHECK(s.objective_trace[t] <= s.objective_trace[t - 1] + 1e-12);

  const KMeansState again = kmeans_lloyd(X, s.centers);
  CHECK(again.centers == s.centers);
  CHECK(again.labels == s.labels);

  SUBCASE("empty cluster is re-seeded at the farthest point") {
    const KMeansState e = kmeans_lloyd(X, column({0, 100}));
    CHECK(std::set<int>(e.labels.begin(), e.labels.end()).size() == 2);
  }
}

TEST_CASE("k-means objective matches exhaustive search on small inputs") {
  oracle::TestRng rng(17);
  for (int t = 0; t < 15; ++t) {
    const int k = rng.integer(2, 3);
    const int n = rng.integer(k, 8);
    DataMatrix X(n, 2);
    for (int i = 0; i < n; ++i) {
      const int g = i % k;
      X(i, 0) = 10.0 * g + 0.5 * rng.normal();
      X(i, 1) = -7.0 * g + 0.5 * rng.normal();
    }
    const KMeansState s = kmeans(X, k, static_cast<std::uint64_t>(t), 10);
    CHECK(s.inertia == doctest::Approx(brute_force_inertia(X, k)).epsilon(1e-10));
  }
}

TEST_CASE("linear AE recovers the top principal direction") {
  oracle::TestRng rng(19);
  DataMatrix X = rng.matrix(2000, 3);
  X.col(0) *= 2.0;
  X.col(2) *= 0.5;
  TrainConfig config;
  config.learning_rate = 0.5;
  config.epochs = 500;
  const LinearAEResult r = train_linear_ae(X, 1, 0.1, config);
  const Matrix e1 = Matrix{{1.0, 0.0, 0.0}};
  CHECK(principal_angle(r.model.U, e1) < 2.0 * std::numbers::pi / 180.0);
  const Matrix top = top_eigenvectors(weighted_covariance(X, AssignmentMatrix::Ones(1, 2000),
                                                          r.model.center, 0), 1);
  CHECK(principal_angle(r.model.U, top) < 1e-4);

  SUBCASE("row order does not change the span") {
    DataMatrix shuffled = X.colwise().reverse();
    const LinearAEResult s = train_linear_ae(shuffled, 1, 0.1, config);
    CHECK(principal_angle(r.model.U, s.model.U) < 1e-6);
  }
}

TEST_CASE("full-rank linear AE reconstructs exactly") {
  oracle::TestRng rng(20);
  const DataMatrix X = rng.matrix(50, 3);
  TrainConfig config;
  const LinearAEResult r = train_linear_ae(X, 3, 1e-9, config);
  CHECK(mse(X, linear_ae_reconstruct(r.model, X)) < 1e-20);
  CHECK(linear_ae_embed(r.model, X).cols() == 3);
  CHECK_THROWS_AS(train_linear_ae(X, 4, 0.1, config), InputError);
}

TEST_CASE("AE then k-means") {
  const LabeledData blobs = generate_planted(separated_blobs_spec(3));
  TrainConfig config;
  config.learning_rate = 0.5;
  CHECK(adjusted_rand_index(blobs.labels, ae_then_kmeans(blobs.X, 1, 2, config)) == 1.0);
  const auto single = ae_then_kmeans(blobs.X, 1, 1, config);
  CHECK(std::set<int>(single.begin(), single.end()).size() == 1);
  config.learning_rate = 0.005;
  const auto mlp = ae_then_kmeans(blobs.X, 1, 2, config, EmbeddingArch::mlp);
  CHECK(mlp.size() == blobs.labels.size());
}

TEST_CASE("crossing clusters: TAE beats AE then k-means") {
  double tae_ari = 0.0, ae_ari = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const LabeledData data = generate_planted(crossing_clusters_spec(100 + seed));
    TrainConfig config;
    config.learning_rate = 0.5;
    config.epochs = 500;
    config.restarts = 10;
    config.seed = seed;
    tae_ari += adjusted_rand_index(data.labels, hard_labels(train(data.X, 2, config).S));
    ae_ari += adjusted_rand_index(data.labels, ae_then_kmeans(data.X, 1, 2, config));
  }
  MESSAGE("mean ARI tae=" << tae_ari / 5 << " ae+kmeans=" << ae_ari / 5);
  CHECK(tae_ari > ae_ari);
}

TEST_CASE("low-rank precision") {
  const Matrix U = Matrix{{1.0, 0.0}};
  CHECK(lowrank_precision_apply(Vector::Unit(2, 0), U, 0.5) == doctest::Approx(0.5));
  CHECK(lowrank_precision_apply(Vector::Unit(2, 1), U, 0.5) == doctest::Approx(1.0));
  const Matrix sigma = lowrank_precision_matrix(U, 0.5).inverse();
  const auto eig = sym_eigendecomp(sigma);
  CHECK(eig.values[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(eig.values[1] == doctest::Approx(1.0).epsilon(1e-12));

  Rng rng(5);
  for (double lambda : {0.1, 0.37, 1.0}) {
    const Matrix V = rng.orthonormal_rows(2, 5);
    const Vector vals = Eigen::SelfAdjointEigenSolver<Matrix>(
                            lowrank_precision_matrix(V, lambda).inverse())
                            .eigenvalues();
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(std::abs(vals[i] - 1.0) < 1e-10);
    for (Eigen::Index i = 3; i < 5; ++i) CHECK(std::abs(vals[i] - 1.0 / lambda) < 1e-10 / lambda);
    const Vector x = rng.gaussian_matrix(5, 1).col(0);
    CHECK(lowrank_precision_apply(x, V, lambda) ==
          doctest::Approx(x.dot(lowrank_precision_matrix(V, lambda) * x)).epsilon(1e-12));
  }
}

TEST_CASE("Gaussian log density against the closed form") {
  Rng rng(6);
  GMMComponent c;
  c.mean = rng.gaussian_matrix(3, 1).col(0);
  c.U = rng.orthonormal_rows(1, 3);
  c.weight = 1.0;
  const double lambda = 0.2;
  const Matrix precision = lowrank_precision_matrix(c.U, lambda);
  const Vector x = rng.gaussian_matrix(3, 1).col(0);
  const Vector r = x - c.mean;
  const double expected = -0.5 * r.dot(precision * r) -
                          0.5 * std::log((2.0 * std::numbers::pi * precision.inverse()).determinant());
  CHECK(gmm_log_density(x, c, lambda) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(gmm_log_density(x, c, lambda, false) ==
        doctest::Approx(-0.5 * r.dot(precision * r)).epsilon(1e-12));
}

TEST_CASE("E step") {
  GMMState state;
  state.lambda = 0.5;
  for (double m : {-1.0, 1.0}) {
    GMMComponent c;
    c.mean = Vector::Constant(2, m);
    c.U = Matrix{{1.0, 0.0}};
    c.weight = 0.5;
    state.components.push_back(c);
  }
  const AssignmentMatrix mid = gmm_e_step(DataMatrix::Zero(1, 2), state);
  CHECK(mid(0, 0) == doctest::Approx(0.5));
  CHECK(mid(1, 0) == doctest::Approx(0.5));

  state.components[1].mean = Vector::Constant(2, 8.0);
  DataMatrix at(1, 2);
  at << -1.0, -1.0;
  const AssignmentMatrix far = gmm_e_step(at, state);
  const Vector r = state.components[1].mean - state.components[0].mean;
  const double ratio = std::exp(-0.5 * lowrank_precision_apply(-r, state.components[1].U, 0.5));
  CHECK(std::abs(far(0, 0) - 1.0 / (1.0 + ratio)) < 1e-12);
  CHECK(std::abs(far(0, 0) - 1.0) < 1e-6);

  oracle::TestRng rng(7);
  const AssignmentMatrix S = gmm_e_step(3.0 * rng.matrix(30, 2), state);
  for (Eigen::Index i = 0; i < S.cols(); ++i) CHECK(S.col(i).sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("M step") {
  const LabeledData data = generate_planted(three_anisotropic_spec(9));
  AssignmentMatrix S = AssignmentMatrix::Zero(3, data.X.rows());
  for (Eigen::Index i = 0; i < data.X.rows(); ++i) S(data.labels[static_cast<std::size_t>(i)], i) = 1.0;
  const GMMState state = gmm_m_step(data.X, S, 1, 0.1);
  double total = 0.0;
  for (Eigen::Index j = 0; j < 3; ++j) {
    const auto& c = state.components[static_cast<std::size_t>(j)];
    Vector mean = Vector::Zero(2);
    for (Eigen::Index i = 0; i < data.X.rows(); ++i)
      if (S(j, i) == 1.0) mean += data.X.row(i).transpose();
    mean /= S.row(j).sum();
    CHECK((c.mean - mean).norm() < 1e-10);
    CHECK((c.U * c.U.transpose() - Matrix::Identity(1, 1)).norm() < 1e-8);
    total += c.weight;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));

  const GMMState one = gmm_m_step(data.X, AssignmentMatrix::Ones(1, data.X.rows()), 1, 0.1);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(
      oracle::weighted_covariance(data.X, AssignmentMatrix::Ones(1, data.X.rows()),
                                  one.components[0].mean, 0));
  CHECK(oracle::principal_angle_svd(one.components[0].U, eig.eigenvectors().col(1).transpose()) < 1e-8);
}

TEST_CASE("EM log likelihood is monotone and agrees with TAE on separated data") {
  const LabeledData data = generate_planted(three_anisotropic_spec(10));
  const EMResult em = run_em(data.X, 3, 1, 0.1, 100, 0);
  REQUIRE(em.log_likelihood.size() == 101);
  for (std::size_t t = 1; t < em.log_likelihood.size(); ++t)
    CHECK(em.log_likelihood[t] >= em.log_likelihood[t - 1] - 1e-9);

  TrainConfig config;
  config.learning_rate = 0.5;
  config.restarts = 5;
  const TrainResult tae = train(data.X, 3, config);
  CHECK(adjusted_rand_index(argmax_labels(em.responsibilities), hard_labels(tae.S)) >= 0.99);

  const EMResult no_det = run_em(data.X, 3, 1, 0.1, 20, 0, false);
  CHECK(adjusted_rand_index(argmax_labels(no_det.responsibilities), hard_labels(tae.S)) >= 0.99);
}

}  // TEST_SUITE
