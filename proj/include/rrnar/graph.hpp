#ifndef RRNAR_GRAPH_HPP
#define RRNAR_GRAPH_HPP

#include "rrnar/types.hpp"

namespace rrnar {

/// Validate a 0/1 matrix with zero diagonal and wrap it.
AdjacencyMatrix make_adjacency(Matrix entries);

/// Divide each row by its out-degree; rows with no out-edges stay zero so
/// isolated nodes simply receive no spillover.
WeightMatrix row_normalize(const AdjacencyMatrix& adj);

/// Node i points at nodes (i+1 ... i+k) mod N.
AdjacencyMatrix build_k_regular_cycle(Index n, Index k);

/// Edge i->j whenever similarity(i,j) > threshold, i != j.
AdjacencyMatrix build_threshold_graph(const Matrix& similarity,
                                      double threshold);

}  // namespace rrnar

#endif
