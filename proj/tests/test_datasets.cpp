#include "oracles.hpp"

#include "tae/datasets.hpp"
#include "tae/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace tae;

namespace {

LabeledData parse(const std::string& text, const std::vector<std::string>& features = {},
                  const std::optional<std::string>& label = std::nullopt) {
  std::istringstream in(text);
  return read_csv(in, features, label);
}

}  // namespace

TEST_SUITE("datasets") {

TEST_CASE("degenerate spread puts every point on its mean") {
  PlantedSpec spec = three_anisotropic_spec(1);
  for (auto& c : spec.clusters) c.std_major = c.std_minor = 1e-9;
  const LabeledData data = generate_planted(spec);
  for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
    const auto& mean = spec.clusters[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(i)])].mean;
    CHECK((data.X.row(i).transpose() - mean).norm() < 1e-7);
  }
  CHECK(data.labels.front() == 0);
  CHECK(data.labels.back() == 2);
}

TEST_CASE("major axis follows the specified angle") {
  PlantedSpec spec;
  spec.n_per_cluster = 1000;
  spec.d = 3;
  spec.seed = 4;
  for (double angle : {25.0, -70.0}) {
    PlantedCluster c;
    c.mean = Vector::Zero(3);
    c.angle_deg = angle;
    c.std_major = 2.0;
    c.std_minor = 0.4;
    spec.clusters.push_back(c);
  }
  const LabeledData data = generate_planted(spec);
  for (Eigen::Index j = 0; j < 2; ++j) {
    AssignmentMatrix S = AssignmentMatrix::Zero(2, data.X.rows());
    for (Eigen::Index i = 0; i < data.X.rows(); ++i)
      S(data.labels[static_cast<std::size_t>(i)], i) = 1.0;
    const Vector mean = data.X.transpose() * S.row(j).transpose() / S.row(j).sum();
    const Matrix top = top_eigenvectors(oracle::weighted_covariance(data.X, S, mean, j), 1);
    const double a = spec.clusters[static_cast<std::size_t>(j)].angle_deg * std::numbers::pi / 180.0;
    const Matrix axis{{std::cos(a), std::sin(a), 0.0}};
    CHECK(oracle::principal_angle_svd(top, axis) < 5.0 * std::numbers::pi / 180.0);
  }
}

TEST_CASE("generation is deterministic with exact proportions") {
  const LabeledData a = generate_planted(crossing_clusters_spec(3));
  const LabeledData b = generate_planted(crossing_clusters_spec(3));
  CHECK(a.X == b.X);
  CHECK(a.labels == b.labels);
  CHECK(std::count(a.labels.begin(), a.labels.end(), 0) == 150);
  CHECK(std::count(a.labels.begin(), a.labels.end(), 1) == 150);
  CHECK_FALSE(generate_planted(crossing_clusters_spec(4)).X == a.X);
  for (const auto& name : preset_names()) CHECK(preset_spec(name, 0).has_value());
  CHECK_FALSE(preset_spec("spiral", 0).has_value());
}

TEST_CASE("planted spec JSON") {
  const PlantedSpec spec = parse_planted_spec(
      R"({"k": 2, "n_per_cluster": 5, "d": 2, "seed": 3, "clusters": [
          {"mean": [0, 0], "angle_deg": 10, "std_major": 1, "std_minor": 0.1},
          {"mean": [4, 0], "angle_deg": 80, "std_major": 1, "std_minor": 0.1}]})");
  CHECK(spec.k() == 2);
  CHECK(spec.seed == 3);
  CHECK(spec.clusters[1].mean[0] == 4.0);
  const PlantedSpec again = parse_planted_spec(planted_spec_to_json(spec));
  CHECK(generate_planted(again).X == generate_planted(spec).X);

  try {
    parse_planted_spec("{\"n_per_cluster\": 5,, }");
    FAIL("expected parse error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_planted_spec(R"({"n_per_cluster": 5, "d": 2, "clusters": [
      {"mean": [0, 0], "angle_deg": 0, "std_major": -1, "std_minor": 1}]})"), InputError);
  CHECK_THROWS_AS(parse_planted_spec(R"({"k": 3, "n_per_cluster": 5, "d": 2, "clusters": [
      {"mean": [0, 0], "angle_deg": 0, "std_major": 1, "std_minor": 1}]})"), InputError);
  CHECK_THROWS_AS(parse_planted_spec(R"({"n_per_cluster": 5, "d": 2, "clusters": [
      {"mean": [0, 0, 1], "angle_deg": 0, "std_major": 1, "std_minor": 1}]})"), InputError);
}

TEST_CASE("CSV examples") {
  const LabeledData a = parse("a,b\n1,2\n3,4\n", {"a", "b"});
  CHECK(a.X == Matrix{{1.0, 2.0}, {3.0, 4.0}});
  CHECK_FALSE(a.has_labels());

  const LabeledData dropped = parse("a,b,c\n1,,3\n4,5,6\n", {"a", "b", "c"});
  CHECK(dropped.dropped_rows == 1);
  CHECK(dropped.X.rows() == 1);
  CHECK(parse("a,b\nNA,1\n2,3\n").dropped_rows == 1);

  const LabeledData labeled = parse("f,species\n1,x\n2,y\n3,x\n", {"f"}, "species");
  CHECK(labeled.labels == std::vector<int>{0, 1, 0});
  CHECK(labeled.label_names == std::vector<std::string>{"x", "y"});

  const LabeledData rest = parse("\xEF\xBB\xBFp,\"q\",label\n1.5,\"2\",a\n", {}, "label");
  CHECK(rest.feature_names == std::vector<std::string>{"p", "q"});
  CHECK(rest.X(0, 1) == 2.0);
  CHECK(parse("").X.rows() == 0);
}

TEST_CASE("CSV errors name the problem") {
  try {
    parse("a,b\n1,2\n", {"a", "zeta"});
    FAIL("expected missing column");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("zeta") != std::string::npos);
  }
  try {
    parse("a,b\n1,2\n3,x4\n", {"a", "b"});
    FAIL("expected numeric error");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("'b'") != std::string::npos);
  }
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv"), InputError);
}

TEST_CASE("CSV round trip") {
  const LabeledData data = generate_planted(three_anisotropic_spec(2));
  std::ostringstream out;
  write_csv(out, data);
  const LabeledData back = parse(out.str(), {}, "label");
  CHECK(back.X == data.X);
  CHECK(back.labels == data.labels);
}

TEST_CASE("z-score normalization") {
  const ZScore z = zscore_normalize(Matrix{{0.0}, {2.0}});
  CHECK(z.X == Matrix{{-1.0}, {1.0}});
  oracle::TestRng rng(3);
  const DataMatrix X = 5.0 * rng.matrix(40, 3).array() + 2.0;
  const ZScore once = zscore_normalize(X);
  CHECK(once.X.colwise().mean().cwiseAbs().maxCoeff() < 1e-12);
  const ZScore twice = zscore_normalize(once.X);
  CHECK((twice.X - once.X).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((zscore_inverse(once.X, once.mean, once.stddev) - X).cwiseAbs().maxCoeff() < 1e-12);
  try {
    zscore_normalize(Matrix{{1.0, 3.0}, {2.0, 3.0}}, {"ok", "flat"});
    FAIL("expected zero-variance error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("flat") != std::string::npos);
  }
}

TEST_CASE("Gaussian corruption") {
  oracle::TestRng rng(4);
  const DataMatrix X = rng.matrix(1000, 100);
  CHECK(corrupt_gaussian(X, 0.0, 1) == X);
  const DataMatrix noisy = corrupt_gaussian(X, 0.3, 7);
  const double variance = (noisy - X).squaredNorm() / static_cast<double>(X.size());
  CHECK(std::abs(variance / 0.09 - 1.0) < 0.05);
  CHECK(corrupt_gaussian(X, 0.3, 7) == noisy);
  CHECK_FALSE(corrupt_gaussian(X, 0.3, 8) == noisy);
  CHECK_THROWS_AS(corrupt_gaussian(X, -1.0, 1), InputError);
}

TEST_CASE("train/test split") {
  const Split s = train_test_split(100, 0.8, 5);
  CHECK(s.train.size() == 80);
  CHECK(s.test.size() == 20);
  std::vector<Eigen::Index> all = s.train;
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  for (Eigen::Index i = 0; i < 100; ++i) CHECK(all[static_cast<std::size_t>(i)] == i);
  CHECK(train_test_split(100, 0.8, 5).test == s.test);
  const DataMatrix X = Matrix{{1.0}, {2.0}, {3.0}};
  CHECK(select_rows(X, {2, 0}) == Matrix{{3.0}, {1.0}});
  CHECK(select_labels({4, 5, 6}, {1}) == std::vector<int>{5});
}

}  // TEST_SUITE
