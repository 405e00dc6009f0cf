#ifndef RRNAR_BASELINES_HPP
#define RRNAR_BASELINES_HPP

#include <utility>
#include <vector>

#include "rrnar/eval.hpp"
#include "rrnar/types.hpp"

namespace rrnar {

/// Component-wise network autoregression: per variable d, pooled OLS of
/// y_{.,d,t} on [y_{.,d,t-1}, (W y_{t-1})_{.,d}].
struct NarParams {
  std::vector<std::pair<double, double>> betas;  // (beta_a, beta_n) per variable
};

NarParams fit_nar(const PanelSeries& panel, const WeightMatrix& w,
                  double cond_limit = 1e12);

Matrix forecast_nar(const NarParams& params, const WeightMatrix& w,
                    const Matrix& y_last);

/// The N x N transition the per-variable NAR coefficients induce on a D=1
/// panel: beta_a I + beta_n W.
Matrix nar_transition(const NarParams& params, const WeightMatrix& w,
                      Index variable = 0);

/// Reduced-rank VAR(1) on vec(Y_t); returns the ND x ND coefficient.
Matrix fit_rrvar(const PanelSeries& panel, Index rank,
                 double cond_limit = 1e12);

/// Full-rank matrix autoregression Y_t = A Y_{t-1} B^T + E_t, alternating
/// least squares from A = I, output balanced |A|_F = |B|_F with the sign
/// fixed by the largest-magnitude diagonal entry of A.
struct MarParams {
  Matrix a;  // N x N
  Matrix b;  // D x D
};

MarParams fit_mar(const PanelSeries& panel, Index iters,
                  double cond_limit = 1e12);

Fitter make_nar_fitter(const WeightMatrix& w);
Fitter make_rrvar_fitter(Index rank);
Fitter make_mar_fitter(Index iters);

}  // namespace rrnar

#endif
