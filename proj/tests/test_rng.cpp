#include "tae/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace tae;

TEST_SUITE("rng") {

TEST_CASE("streams are reproducible") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    CHECK(x == b.normal());
    (void)c;
  }
  CHECK(Rng(1).uniform() != Rng(2).uniform());
  CHECK(std::string(Rng::kAlgorithm) == "mt19937_64/u53/box-muller v1");
}

TEST_CASE("distribution moments") {
  Rng rng(7);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0;
  double lo = 1, hi = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(std::abs(su / n - 0.5) < 0.005);
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(std::abs(sn2 / n - 1.0) < 0.01);
  for (int i = 0; i < 1000; ++i) CHECK(rng.index(7) < 7);
}

TEST_CASE("orthonormal rows") {
  Rng rng(3);
  const Matrix U = rng.orthonormal_rows(3, 6);
  CHECK((U * U.transpose() - Matrix::Identity(3, 3)).norm() < 1e-12);
  CHECK_THROWS_AS(rng.orthonormal_rows(4, 3), InputError);
  Matrix deficient{{1.0, 2.0}, {2.0, 4.0}};
  CHECK_FALSE(orthonormalize_rows(deficient));
}

}  // TEST_SUITE
