#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rrnar/kronecker.hpp"
#include "support/test_util.hpp"

using namespace rrnar;
using testing::random_matrix;

TEST_CASE("kron basics") {
  CHECK((kron(Matrix::Identity(2, 2), Matrix::Identity(3, 3)) -
         Matrix::Identity(6, 6))
            .norm() == 0.0);
  Matrix two(1, 1), three(1, 1);
  two << 2;
  three << 3;
  CHECK(kron(two, three)(0, 0) == 6.0);
}

TEST_CASE("kron Frobenius norm is multiplicative") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix m = random_matrix(3, 2, rng);
    Matrix k = random_matrix(2, 4, rng);
    CHECK(kron(m, k).norm() ==
          doctest::Approx(m.norm() * k.norm()).epsilon(1e-12));
  }
}

TEST_CASE("rearrange_P on a scalar-scalar product") {
  Matrix six(1, 1);
  six << 6;
  CHECK(rearrange_P(six, 1, 1)(0, 0) == 6.0);
}

TEST_CASE("rearrange_P maps Kronecker products to outer products exactly") {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    Index n = 2 + (trial % 3), d = 2 + (trial % 2);
    Matrix m = random_matrix(d, d, rng);
    Matrix k = random_matrix(n, n, rng);
    Matrix lhs = rearrange_P(kron(m, k), n, d);
    Matrix rhs = vec(m) * vec(k).transpose();
    // Entry-for-entry products of the same doubles: bitwise equal.
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("rearrange_P round trip and isometry") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    Index n = 2 + (trial % 4), d = 1 + (trial % 3);
    Matrix a = random_matrix(n * d, n * d, rng);
    Matrix p = rearrange_P(a, n, d);
    CHECK((rearrange_P_inv(p, n, d) - a).cwiseAbs().maxCoeff() == 0.0);
    CHECK(p.norm() == doctest::Approx(a.norm()).epsilon(1e-12));
  }
}

TEST_CASE("rearrange_P_inv recovers Kronecker structure from outer products") {
  Rng rng(19);
  Matrix m = random_matrix(2, 2, rng);
  Matrix k = random_matrix(3, 3, rng);
  Matrix outer = vec(m) * vec(k).transpose();
  CHECK((rearrange_P_inv(outer, 3, 2) - kron(m, k)).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK(rearrange_P_inv(Matrix::Zero(4, 9), 3, 2).norm() == 0.0);
}

TEST_CASE("rearrange shape errors") {
  CHECK_THROWS_AS(rearrange_P(Matrix::Zero(5, 5), 2, 2), shape_error);
  CHECK_THROWS_AS(rearrange_P_inv(Matrix::Zero(3, 4), 2, 2), shape_error);
}
