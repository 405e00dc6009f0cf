#ifndef RRNAR_OBJECTIVE_HPP
#define RRNAR_OBJECTIVE_HPP

#include <vector>

#include "rrnar/types.hpp"

namespace rrnar {

/// Vectorized regression layout. Column t of y is vec(Y_{t+L}); block ell
/// (1-based) of column t of x is vec(Y_{t+L-ell}). Columns are ordered by
/// increasing time.
struct StackedData {
  Matrix y;  // ND x T
  Matrix x;  // (L*ND) x T
  Index nodes = 0;
  Index vars = 0;
  Index lag = 1;
  Index t_eff = 0;
};

StackedData stack_lag(const PanelSeries& panel, Index lag);

/// Per-lag gradient blocks of the least-squares loss.
struct GradientSet {
  struct Lag {
    double beta_a = 0.0;
    double beta_n = 0.0;
    Matrix u;      // D x r
    Matrix v;      // D x r
    Matrix b_net;  // N x N
    Matrix b_var;  // D x D
  };
  std::vector<Lag> lags;
};

/// (1/2T) sum_t || Y_t - sum_l B_net_l Y_{t-l} B_var_l^T ||_F^2, evaluated
/// slice by slice; the Kronecker transition is never formed.
double loss(const ParamSet& params, const WeightMatrix& w,
            const StackedData& data);

/// Gradient with respect to the concatenated transition [A_1 ... A_L]:
/// -(1/T) (Y - A X) X^T.
Matrix grad_A(const ParamSet& params, const WeightMatrix& w,
              const StackedData& data);

/// Block gradients via the residual-contraction identities
///   g_bvar = -(1/T) sum_t R_t^T (B_net Y_{t-l}),
///   g_bnet = -(1/T) sum_t R_t (B_var Y_{t-l}^T)^T,
/// then g_beta_a = <I, g_bnet>, g_beta_n = <W, g_bnet>, g_u = g_bvar V,
/// g_v = g_bvar^T U.
GradientSet grad_blocks(const ParamSet& params, const WeightMatrix& w,
                        const StackedData& data);

/// Same blocks extracted from grad_A through the rearrangement operator;
/// kept as an independent route for cross-validation.
GradientSet grad_blocks_rearranged(const ParamSet& params,
                                   const WeightMatrix& w,
                                   const StackedData& data);

/// Fused loss-plus-gradient evaluator over per-lag design stacks. All the
/// iterative solvers run on this; the contraction avoids both the N x N
/// and D x D intermediates, working at O(T N D r) per evaluation.
class FitEngine {
 public:
  FitEngine(const PanelSeries& panel, const WeightMatrix& w, Index lag);

  struct Blocks {
    double beta_a = 0.0;
    double beta_n = 0.0;
    Matrix u;
    Matrix v;
  };

  /// Loss at params; block gradients written to grads (resized to L).
  double loss_and_grads(const ParamSet& params, std::vector<Blocks>& grads);

  double loss_at(const ParamSet& params);

  Index t_eff() const { return t_eff_; }
  Index nodes() const { return nodes_; }
  Index vars() const { return vars_; }
  Index lag() const { return lag_; }
  const Matrix& y_stack() const { return y_stack_; }
  const Matrix& x_stack(Index ell) const { return x_stack_[ell]; }
  const Matrix& wx_stack(Index ell) const { return wx_stack_[ell]; }

 private:
  void accumulate_residual(const ParamSet& params);

  Index nodes_, vars_, lag_, t_eff_;
  Matrix y_stack_;                 // (T*N) x D
  std::vector<Matrix> x_stack_;    // per lag, (T*N) x D: stacked Y_{t-l}
  std::vector<Matrix> wx_stack_;   // per lag, (T*N) x D: stacked W Y_{t-l}
  Matrix residual_;                // (T*N) x D scratch
  std::vector<Matrix> xv_, wxv_;   // per lag, (T*N) x r scratch
  Matrix ru_;                      // (T*N) x r scratch
};

}  // namespace rrnar

#endif
