#include "tae/model_io.hpp"
#include "tae/rng.hpp"

#include <doctest.h>

using namespace tae;

TEST_SUITE("model_io") {

TEST_CASE("linear model round trip is exact") {
  Rng rng(1);
  TAEModel m;
  m.lambda = 0.1 + 1e-17;
  m.seed = 12345678901234ULL;
  m.s_update = SUpdate::projected_gradient;
  for (int j = 0; j < 2; ++j) {
    ClusterLinearAE ae;
    ae.U = rng.orthonormal_rows(2, 3);
    ae.V = ae.U.transpose();
    ae.C = rng.gaussian_matrix(3, 1).col(0);
    m.clusters.push_back(ae);
  }
  const nlohmann::json doc = to_json(m);
  CHECK(doc["k"] == 2);
  CHECK(doc["h"] == 2);
  CHECK(doc["clusters"][0]["U"].size() == 6);
  CHECK(doc["clusters"][0]["U"][1] == m.clusters[0].U(0, 1));
  const TAEModel back = linear_model_from_json(nlohmann::json::parse(doc.dump()));
  CHECK(back.lambda == m.lambda);
  CHECK(back.seed == m.seed);
  CHECK(back.s_update == m.s_update);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(back.clusters[j].U == m.clusters[j].U);
    CHECK(back.clusters[j].V == m.clusters[j].V);
    CHECK(back.clusters[j].C == m.clusters[j].C);
  }
  CHECK(std::holds_alternative<TAEModel>(model_from_json(doc)));
}

TEST_CASE("MLP model round trip is exact") {
  Rng rng(2);
  TensorizedMLP m;
  m.lambda = 0.25;
  for (int j = 0; j < 2; ++j) {
    m.clusters.push_back(random_mlp(3, 5, 1, Activation::tanh, rng));
    m.centers.push_back(rng.gaussian_matrix(3, 1).col(0));
  }
  m.clusters[1].b3 = rng.gaussian_matrix(5, 1).col(0);
  const nlohmann::json doc = to_json(m);
  CHECK(doc["arch"] == "mlp");
  const AnyModel any = model_from_json(nlohmann::json::parse(doc.dump()));
  REQUIRE(std::holds_alternative<TensorizedMLP>(any));
  const auto& back = std::get<TensorizedMLP>(any);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(flatten(back.clusters[j]) == flatten(m.clusters[j]));
    CHECK(back.centers[j] == m.centers[j]);
    CHECK(back.clusters[j].activation == Activation::tanh);
  }
}

TEST_CASE("malformed model documents are input errors") {
  CHECK_THROWS_AS(linear_model_from_json(nlohmann::json::parse(R"({"version": 2})")), InputError);
  CHECK_THROWS_AS(matrix_from_json(nlohmann::json::array({1.0, 2.0}), 2, 2), InputError);
  CHECK_THROWS_AS(load_json_file("/nonexistent/model.json"), InputError);
}

}  // TEST_SUITE
