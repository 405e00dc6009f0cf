#ifndef RRNAR_ESTIMATOR_HPP
#define RRNAR_ESTIMATOR_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "rrnar/objective.hpp"
#include "rrnar/rng.hpp"
#include "rrnar/types.hpp"

namespace rrnar {

struct FitConfig {
  double eta = 0.25;
  Index max_iter = 2000;
  double rel_tol = 1e-10;
  Index als_sweeps = 1;
  Index lag = 1;
  std::vector<Index> ranks;  // one per lag; empty with auto_ranks set
  bool auto_ranks = false;
  Index r_bar = 0;  // 0 => min(D/2, 10), clamped to [2, D]
  double ridge_factor = 0.5;
  double gram_cond_limit = 1e12;
  std::uint64_t seed = 0;
  bool sequential_updates = false;    // Gauss-Seidel block order, off by default
  bool rank_select_als_only = false;  // skip the descent polish in select_rank

  std::vector<Index> resolved_ranks(Index vars) const;
  Index resolved_r_bar(Index vars) const;
};

struct FitResult {
  ParamSet params;  // norm-balanced, beta_a sign-resolved
  std::vector<double> loss_trace;
  Index iters = 0;
  bool converged = false;
  std::vector<Index> selected_ranks;
  ParamSet init_params;
};

/// Reduced-rank regression coefficient: rows of y_stack regressed on rows
/// of x_stack under a rank constraint. Returns the q x p matrix B with
/// y ~ x B^T, B = Gamma Gamma^T S_yx S_xx^{-1}, Gamma the leading
/// eigenvectors of S_yx S_xx^{-1} S_yx^T.
Matrix rrr_solve(const Matrix& x_stack, const Matrix& y_stack, Index rank,
                 double cond_limit = 1e12);

/// Joint least squares for all 2L network scalars given the variable
/// operators; the Gram matrix is assembled from stack contractions, the
/// ND x 2L regressor matrix is never materialized.
std::vector<std::pair<double, double>> ols_betas(
    const std::vector<Matrix>& b_var_per_lag, const PanelSeries& panel,
    const WeightMatrix& w, double cond_limit = 1e12);

/// ALS warm start: scalars drawn uniformly from the triangle
/// {beta_a, beta_n > 0, beta_a + beta_n < 1}, then a reduced-rank pass for
/// the variable operators, then als_sweeps rounds of (scalar OLS,
/// reduced-rank pass).
ParamSet initialize(const PanelSeries& panel, const WeightMatrix& w,
                    const std::vector<Index>& ranks, const FitConfig& cfg,
                    Rng& rng);

/// Best rank-r split of b_var: U = L_r S_r^{1/2}, V = R_r S_r^{1/2} from the
/// compact SVD, so U V^T is the Eckart-Young truncation and |U|_F = |V|_F.
std::pair<Matrix, Matrix> factor_split(const Matrix& b_var, Index rank);

/// Rescale each lag so |B_net|_F = |B_var|_F and flip the joint sign so
/// beta_a >= 0. Leaves the per-lag Kronecker transition unchanged.
ParamSet balance(const ParamSet& params, const WeightMatrix& w);

/// Preconditioned gradient descent with simultaneous block updates.
FitResult scaled_gd(const PanelSeries& panel, const WeightMatrix& w,
                    const ParamSet& init, const FitConfig& cfg);

/// Ridge-ratio index: argmin_j (s_{j+1} + ridge) / (s_j + ridge) over
/// 1 <= j < r_bar, ties to the smallest j. Expects singular values sorted
/// descending.
Index rank_from_singvals(const Vector& singvals, double ridge);

struct SelectionResult {
  std::vector<Index> ranks;
  std::vector<Vector> singvals;  // per lag, descending, length r_bar
  double ridge = 0.0;
  FitResult fit;  // the rank-r_bar fit the selection was read from
};

SelectionResult select_rank_detail(const PanelSeries& panel,
                                   const WeightMatrix& w, Index r_bar,
                                   const FitConfig& cfg, Rng& rng);

std::vector<Index> select_rank(const PanelSeries& panel, const WeightMatrix& w,
                               Index r_bar, const FitConfig& cfg, Rng& rng);

/// End-to-end estimation: rank selection when requested, ALS warm start,
/// descent polish.
FitResult fit_rrnar(const PanelSeries& panel, const WeightMatrix& w,
                    const FitConfig& cfg, Rng& rng);

}  // namespace rrnar

#endif
