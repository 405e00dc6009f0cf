#include "rrnar/graph.hpp"

#include <string>

namespace rrnar {

AdjacencyMatrix make_adjacency(Matrix entries) {
  if (entries.rows() != entries.cols())
    throw shape_error("adjacency matrix must be square");
  for (Index i = 0; i < entries.rows(); ++i) {
    for (Index j = 0; j < entries.cols(); ++j) {
      double a = entries(i, j);
      if (a != 0.0 && a != 1.0)
        throw input_error("adjacency entries must be exactly 0 or 1");
      if (i == j && a != 0.0)
        throw input_error("adjacency diagonal must be zero (no self-loops)");
    }
  }
  return AdjacencyMatrix{std::move(entries)};
}

WeightMatrix row_normalize(const AdjacencyMatrix& adj) {
  WeightMatrix w;
  w.entries = adj.entries;
  for (Index i = 0; i < w.entries.rows(); ++i) {
    double degree = w.entries.row(i).sum();
    if (degree > 0.0) w.entries.row(i) /= degree;
  }
  w.frob_sq = w.entries.squaredNorm();
  return w;
}

AdjacencyMatrix build_k_regular_cycle(Index n, Index k) {
  if (k < 1 || k >= n)
    throw invalid_degree_error("k-regular cycle needs 1 <= k <= N-1, got k=" +
                               std::to_string(k) + ", N=" + std::to_string(n));
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index step = 1; step <= k; ++step) a(i, (i + step) % n) = 1.0;
  return AdjacencyMatrix{std::move(a)};
}

AdjacencyMatrix build_threshold_graph(const Matrix& similarity,
                                      double threshold) {
  if (similarity.rows() != similarity.cols())
    throw shape_error("similarity matrix must be square");
  Index n = similarity.rows();
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j && similarity(i, j) > threshold) a(i, j) = 1.0;
  return AdjacencyMatrix{std::move(a)};
}

}  // namespace rrnar
