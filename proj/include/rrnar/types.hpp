#ifndef RRNAR_TYPES_HPP
#define RRNAR_TYPES_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rrnar/errors.hpp"

namespace rrnar {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Binary directed graph, zero diagonal.
struct AdjacencyMatrix {
  Matrix entries;

  Index nodes() const { return entries.rows(); }
};

/// Row-normalized network operator. Rows sum to 1, or to 0 for nodes with
/// no out-edges. The squared Frobenius norm is cached because every
/// preconditioner and error weight needs it.
struct WeightMatrix {
  Matrix entries;
  double frob_sq = 0.0;

  Index nodes() const { return entries.rows(); }
};

/// Observed sequence of nodes-by-variables matrices Y_1..Y_T.
struct PanelSeries {
  std::vector<Matrix> data;
  Index nodes = 0;
  Index vars = 0;
  std::vector<std::string> node_labels;  // optional
  std::vector<std::string> var_labels;   // optional

  Index total() const { return static_cast<Index>(data.size()); }
};

/// One lag of the model: scalars for the node side, factors for the
/// variable side. B_net = beta_a*I + beta_n*W, B_var = u*v^T.
struct LagParams {
  double beta_a = 0.0;
  double beta_n = 0.0;
  Matrix u;  // D x r
  Matrix v;  // D x r

  Index rank() const { return u.cols(); }
  Matrix b_var() const { return u * v.transpose(); }
  Matrix b_net(const WeightMatrix& w) const {
    return beta_a * Matrix::Identity(w.nodes(), w.nodes()) + beta_n * w.entries;
  }
  double b_net_frob_sq(const WeightMatrix& w) const {
    // <I, W> = 0 because W has zero diagonal.
    return beta_a * beta_a * static_cast<double>(w.nodes()) +
           beta_n * beta_n * w.frob_sq;
  }
};

struct ParamSet {
  std::vector<LagParams> lags;
  Index nodes = 0;
  Index vars = 0;

  Index lag_order() const { return static_cast<Index>(lags.size()); }
};

struct ModelDims {
  Index nodes = 0;
  Index vars = 0;
  Index lag = 1;
  std::vector<Index> ranks;

  void validate() const {
    if (nodes < 1 || vars < 1 || lag < 1)
      throw input_error("ModelDims: need N >= 1, D >= 1, L >= 1");
    if (static_cast<Index>(ranks.size()) != lag)
      throw input_error("ModelDims: one rank per lag required");
    for (Index r : ranks)
      if (r < 1 || r > vars)
        throw input_error("ModelDims: ranks must satisfy 1 <= r <= D");
  }
};

}  // namespace rrnar

#endif
