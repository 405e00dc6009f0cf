#ifndef RRNAR_TEST_UTIL_HPP
#define RRNAR_TEST_UTIL_HPP

#include <functional>
#include <vector>

#include "rrnar/graph.hpp"
#include "rrnar/rng.hpp"
#include "rrnar/types.hpp"

namespace rrnar::testing {

inline Matrix random_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

inline ParamSet random_params(Index n, Index d, Index lag,
                              const std::vector<Index>& ranks, Rng& rng,
                              double beta_scale = 0.3) {
  ParamSet p;
  p.nodes = n;
  p.vars = d;
  for (Index ell = 0; ell < lag; ++ell) {
    LagParams lp;
    lp.beta_a = beta_scale * rng.uniform();
    lp.beta_n = beta_scale * rng.uniform();
    lp.u = random_matrix(d, ranks[ell], rng) * 0.5;
    lp.v = random_matrix(d, ranks[ell], rng) * 0.5;
    p.lags.push_back(std::move(lp));
  }
  return p;
}

inline PanelSeries random_panel(Index n, Index d, Index t_total, Rng& rng) {
  PanelSeries panel;
  panel.nodes = n;
  panel.vars = d;
  for (Index t = 0; t < t_total; ++t)
    panel.data.push_back(random_matrix(n, d, rng));
  return panel;
}

/// Noise-free trajectory from a random start, long enough that every
/// consecutive pair obeys the recursion exactly.
inline PanelSeries noiseless_panel(const ParamSet& params,
                                   const WeightMatrix& w, Index t_total,
                                   Rng& rng) {
  const Index lag = params.lag_order();
  PanelSeries panel;
  panel.nodes = params.nodes;
  panel.vars = params.vars;
  for (Index i = 0; i < lag; ++i)
    panel.data.push_back(random_matrix(params.nodes, params.vars, rng));
  for (Index t = lag; t < t_total; ++t) {
    Matrix y = Matrix::Zero(params.nodes, params.vars);
    for (Index ell = 0; ell < lag; ++ell)
      y += params.lags[ell].b_net(w) * panel.data[t - 1 - ell] *
           params.lags[ell].b_var().transpose();
    panel.data.push_back(std::move(y));
  }
  return panel;
}

/// Central finite difference of a scalar functional.
inline double central_diff(const std::function<double(double)>& f, double x,
                           double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline WeightMatrix cycle_weight(Index n, Index k = 1) {
  return row_normalize(build_k_regular_cycle(n, k));
}

}  // namespace rrnar::testing

#endif
