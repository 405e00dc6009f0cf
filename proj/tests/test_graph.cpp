#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rrnar/graph.hpp"
#include "support/test_util.hpp"

using namespace rrnar;

TEST_CASE("row_normalize keeps a plain cycle unchanged") {
  AdjacencyMatrix adj = build_k_regular_cycle(3, 1);
  WeightMatrix w = row_normalize(adj);
  CHECK((w.entries - adj.entries).norm() == 0.0);
  for (Index i = 0; i < 3; ++i)
    CHECK(w.entries.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w.frob_sq == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("row_normalize divides by out-degree, zero rows stay zero") {
  Matrix a(3, 3);
  a << 0, 1, 1, 1, 0, 0, 0, 0, 0;
  WeightMatrix w = row_normalize(make_adjacency(a));
  Matrix expected(3, 3);
  expected << 0, 0.5, 0.5, 1, 0, 0, 0, 0, 0;
  CHECK((w.entries - expected).norm() == 0.0);
  CHECK(w.frob_sq == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("k-regular weight norm is N/k") {
  for (auto [n, k] : {std::pair<Index, Index>{6, 2},
                      {10, 3},
                      {12, 6},
                      {30, 29}}) {
    WeightMatrix w = row_normalize(build_k_regular_cycle(n, k));
    CHECK(w.frob_sq == doctest::Approx(static_cast<double>(n) / k)
                           .epsilon(1e-12));
  }
}

TEST_CASE("build_k_regular_cycle layout") {
  SUBCASE("pure directed cycle at k=1") {
    AdjacencyMatrix adj = build_k_regular_cycle(4, 1);
    for (Index i = 0; i < 4; ++i) {
      CHECK(adj.entries.row(i).sum() == 1.0);
      CHECK(adj.entries(i, (i + 1) % 4) == 1.0);
    }
  }
  SUBCASE("row 0 of (N=5, k=2) has ones at columns 1 and 2 only") {
    AdjacencyMatrix adj = build_k_regular_cycle(5, 2);
    CHECK(adj.entries(0, 1) == 1.0);
    CHECK(adj.entries(0, 2) == 1.0);
    CHECK(adj.entries.row(0).sum() == 2.0);
  }
  SUBCASE("invalid degrees") {
    CHECK_THROWS_AS(build_k_regular_cycle(3, 3), invalid_degree_error);
    CHECK_THROWS_AS(build_k_regular_cycle(3, 0), invalid_degree_error);
  }
}

TEST_CASE("threshold graph") {
  SUBCASE("all-ones off-diagonal similarity gives the complete graph") {
    Matrix s = Matrix::Ones(4, 4);
    AdjacencyMatrix adj = build_threshold_graph(s, 0.5);
    CHECK(adj.entries.sum() == 12.0);
    CHECK(adj.entries.diagonal().sum() == 0.0);
  }
  SUBCASE("threshold above the correlation range gives the empty graph") {
    Matrix s = Matrix::Ones(4, 4);
    CHECK(build_threshold_graph(s, 1.1).entries.sum() == 0.0);
  }
  SUBCASE("3x3 example") {
    Matrix s(3, 3);
    s << 1, 0.6, 0.2, 0.6, 1, 0.7, 0.2, 0.7, 1;
    AdjacencyMatrix adj = build_threshold_graph(s, 0.5);
    Matrix expected(3, 3);
    expected << 0, 1, 0, 1, 0, 1, 0, 1, 0;
    CHECK((adj.entries - expected).norm() == 0.0);
  }
  SUBCASE("non-square input") {
    CHECK_THROWS_AS(build_threshold_graph(Matrix::Ones(2, 3), 0.5),
                    shape_error);
  }
}

TEST_CASE("row sums of random threshold graphs are exactly 0 or 1") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Index n = 3 + static_cast<Index>(rng.uniform() * 10);
    Matrix s = testing::random_matrix(n, n, rng);
    s = 0.5 * (s + s.transpose());
    WeightMatrix w = row_normalize(build_threshold_graph(s, 0.3));
    for (Index i = 0; i < n; ++i) {
      double sum = w.entries.row(i).sum();
      bool ok = std::abs(sum) <= 1e-12 || std::abs(sum - 1.0) <= 1e-12;
      CHECK(ok);
    }
    CHECK(w.frob_sq ==
          doctest::Approx(w.entries.squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("make_adjacency validation") {
  Matrix bad(2, 2);
  bad << 0, 0.5, 1, 0;
  CHECK_THROWS_AS(make_adjacency(bad), input_error);
  Matrix diag(2, 2);
  diag << 1, 0, 0, 0;
  CHECK_THROWS_AS(make_adjacency(diag), input_error);
  CHECK_THROWS_AS(make_adjacency(Matrix::Zero(2, 3)), shape_error);
}
