#include "rrnar/estimator.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rrnar {

namespace {

// Relative loss floor treated as an exact fit; stops self-consistent
// noiseless runs from churning on rounding noise.
constexpr double kZeroLossRel = 1e-25;

double sym_cond(const Matrix& gram) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues().minCoeff();
  double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

// Solve gram * x = rhs with a one-shot ridge rescue when ill-conditioned.
Matrix solve_spd_with_rescue(Matrix gram, const Matrix& rhs, double cond_limit,
                             const char* what) {
  if (sym_cond(gram) > cond_limit) {
    double eps = 1e-10 * gram.trace() / static_cast<double>(gram.rows());
    gram += eps * Matrix::Identity(gram.rows(), gram.cols());
    if (!(eps > 0.0) || sym_cond(gram) > cond_limit)
      throw ill_conditioned_error(std::string(what) +
                                  ": Gram matrix is numerically singular");
  }
  return gram.ldlt().solve(rhs);
}

std::vector<Matrix> bvar_transposes(const ParamSet& p) {
  std::vector<Matrix> out(p.lag_order());
  for (Index ell = 0; ell < p.lag_order(); ++ell)
    out[ell] = p.lags[ell].b_var().transpose();
  return out;
}

std::vector<std::pair<double, double>> ols_betas_impl(
    const std::vector<Matrix>& b_var_per_lag, const FitEngine& engine,
    double cond_limit) {
  const Index l = engine.lag();
  if (static_cast<Index>(b_var_per_lag.size()) != l)
    throw shape_error("ols_betas: one B_var per lag required");
  const Index cols = 2 * l;

  // Design column (2*ell)   : stacked Y_{t-ell-1} B_var^T      (beta_a)
  // Design column (2*ell+1) : stacked W Y_{t-ell-1} B_var^T    (beta_n)
  std::vector<Matrix> columns(cols);
  for (Index ell = 0; ell < l; ++ell) {
    Matrix bt = b_var_per_lag[ell].transpose();
    columns[2 * ell].noalias() = engine.x_stack(ell) * bt;
    columns[2 * ell + 1].noalias() = engine.wx_stack(ell) * bt;
  }

  Matrix gram(cols, cols);
  Vector rhs(cols);
  for (Index i = 0; i < cols; ++i) {
    rhs(i) = columns[i].cwiseProduct(engine.y_stack()).sum();
    for (Index j = i; j < cols; ++j) {
      gram(i, j) = columns[i].cwiseProduct(columns[j]).sum();
      gram(j, i) = gram(i, j);
    }
  }

  if (sym_cond(gram) > cond_limit) {
    double eps = 1e-10 * gram.trace() / static_cast<double>(cols);
    gram += eps * Matrix::Identity(cols, cols);
    if (!(eps > 0.0) || sym_cond(gram) > cond_limit)
      throw collinear_design_error(
          "ols_betas: scalar design is collinear (is W degenerate?)");
  }
  Vector beta = gram.ldlt().solve(rhs);

  std::vector<std::pair<double, double>> out(l);
  for (Index ell = 0; ell < l; ++ell)
    out[ell] = {beta(2 * ell), beta(2 * ell + 1)};
  return out;
}

// One pass of per-lag reduced-rank solves against the residual left by the
// other lags' current operators.
void rrr_pass(const FitEngine& engine,
              const std::vector<std::pair<double, double>>& betas,
              const std::vector<Index>& ranks, double cond_limit,
              std::vector<Matrix>& b_var) {
  const Index l = engine.lag();
  for (Index ell = 0; ell < l; ++ell) {
    Matrix x_pred = betas[ell].first * engine.x_stack(ell) +
                    betas[ell].second * engine.wx_stack(ell);
    Matrix y_resp = engine.y_stack();
    for (Index m = 0; m < l; ++m) {
      if (m == ell || b_var[m].size() == 0) continue;
      y_resp.noalias() -= (betas[m].first * engine.x_stack(m) +
                           betas[m].second * engine.wx_stack(m)) *
                          b_var[m].transpose();
    }
    b_var[ell] = rrr_solve(x_pred, y_resp, ranks[ell], cond_limit);
  }
}

}  // namespace

std::vector<Index> FitConfig::resolved_ranks(Index vars) const {
  if (auto_ranks || ranks.empty())
    throw input_error("FitConfig: explicit ranks requested but none set");
  for (Index r : ranks)
    if (r < 1 || r > vars) throw input_error("FitConfig: ranks must be in [1, D]");
  return ranks;
}

Index FitConfig::resolved_r_bar(Index vars) const {
  Index r = r_bar > 0 ? r_bar : std::min<Index>(vars / 2, 10);
  r = std::min(r, vars);
  return std::max<Index>(r, 2);
}

Matrix rrr_solve(const Matrix& x_stack, const Matrix& y_stack, Index rank,
                 double cond_limit) {
  if (x_stack.rows() != y_stack.rows())
    throw shape_error("rrr_solve: predictor/response row mismatch");
  const Index p = x_stack.cols(), q = y_stack.cols();
  if (rank < 1 || rank > q)
    throw input_error("rrr_solve: need 1 <= rank <= response dimension");

  Matrix s_xx = x_stack.transpose() * x_stack;  // p x p
  Matrix s_yx = y_stack.transpose() * x_stack;  // q x p
  // pi_ols^T = S_xx^{-1} S_yx^T
  Matrix pi_ols = solve_spd_with_rescue(s_xx, s_yx.transpose(), cond_limit,
                                        "rrr_solve")
                      .transpose();
  if (rank >= q) return pi_ols;

  Matrix m = pi_ols * s_yx.transpose();  // S_yx S_xx^{-1} S_xy, q x q
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  // Eigenvalues come out ascending; the leading subspace sits rightmost.
  Matrix gamma = es.eigenvectors().rightCols(rank);
  return gamma * (gamma.transpose() * pi_ols);
}

std::vector<std::pair<double, double>> ols_betas(
    const std::vector<Matrix>& b_var_per_lag, const PanelSeries& panel,
    const WeightMatrix& w, double cond_limit) {
  FitEngine engine(panel, w, static_cast<Index>(b_var_per_lag.size()));
  return ols_betas_impl(b_var_per_lag, engine, cond_limit);
}

std::pair<Matrix, Matrix> factor_split(const Matrix& b_var, Index rank) {
  if (b_var.rows() != b_var.cols())
    throw shape_error("factor_split: square matrix expected");
  if (rank < 1 || rank > b_var.rows())
    throw input_error("factor_split: need 1 <= rank <= D");
  Eigen::JacobiSVD<Matrix> svd(b_var,
                               Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector scale = svd.singularValues().head(rank).cwiseSqrt();
  Matrix u = svd.matrixU().leftCols(rank) * scale.asDiagonal();
  Matrix v = svd.matrixV().leftCols(rank) * scale.asDiagonal();
  return {u, v};
}

ParamSet initialize(const PanelSeries& panel, const WeightMatrix& w,
                    const std::vector<Index>& ranks, const FitConfig& cfg,
                    Rng& rng) {
  const Index l = static_cast<Index>(ranks.size());
  if (l < 1) throw input_error("initialize: at least one lag required");
  FitEngine engine(panel, w, l);

  std::vector<std::pair<double, double>> betas(l);
  for (Index ell = 0; ell < l; ++ell) {
    double a, b;
    do {
      a = rng.uniform();
      b = rng.uniform();
    } while (a + b >= 1.0);
    betas[ell] = {a, b};
  }

  std::vector<Matrix> b_var(l);
  rrr_pass(engine, betas, ranks, cfg.gram_cond_limit, b_var);
  for (Index sweep = 0; sweep < cfg.als_sweeps; ++sweep) {
    betas = ols_betas_impl(b_var, engine, cfg.gram_cond_limit);
    rrr_pass(engine, betas, ranks, cfg.gram_cond_limit, b_var);
  }

  ParamSet out;
  out.nodes = panel.nodes;
  out.vars = panel.vars;
  out.lags.resize(l);
  for (Index ell = 0; ell < l; ++ell) {
    out.lags[ell].beta_a = betas[ell].first;
    out.lags[ell].beta_n = betas[ell].second;
    std::tie(out.lags[ell].u, out.lags[ell].v) =
        factor_split(b_var[ell], ranks[ell]);
  }
  return out;
}

ParamSet balance(const ParamSet& params, const WeightMatrix& w) {
  ParamSet out = params;
  for (LagParams& lag : out.lags) {
    double net_sq = lag.b_net_frob_sq(w);
    double var_sq = (lag.u.transpose() * lag.u)
                        .cwiseProduct(lag.v.transpose() * lag.v)
                        .sum();
    if (!(net_sq > 0.0) || !(var_sq > 0.0)) continue;  // degenerate lag: leave
    double s = std::sqrt(std::sqrt(net_sq / var_sq));  // s^2 = |B_net|/|B_var|
    lag.beta_a /= s * s;
    lag.beta_n /= s * s;
    lag.u *= s;
    lag.v *= s;
    if (lag.beta_a < 0.0) {
      lag.beta_a = -lag.beta_a;
      lag.beta_n = -lag.beta_n;
      lag.u = -lag.u;
    }
  }
  return out;
}

FitResult scaled_gd(const PanelSeries& panel, const WeightMatrix& w,
                    const ParamSet& init, const FitConfig& cfg) {
  if (cfg.eta <= 0.0) throw input_error("scaled_gd: eta must be positive");
  if (cfg.max_iter < 1) throw input_error("scaled_gd: max_iter must be >= 1");
  const Index l = init.lag_order();
  const double n_nodes = static_cast<double>(panel.nodes);

  FitEngine engine(panel, w, l);
  const double loss_floor =
      kZeroLossRel * engine.y_stack().squaredNorm() /
      (2.0 * static_cast<double>(engine.t_eff()));

  FitResult result;
  result.init_params = init;
  ParamSet p = init;

  std::vector<FitEngine::Blocks> grads;
  double prev_loss = engine.loss_and_grads(p, grads);
  result.loss_trace.push_back(prev_loss);

  auto apply_block_updates = [&](const std::vector<FitEngine::Blocks>& g,
                                 ParamSet& cur, int which) {
    // which: bitmask 1 = scalars, 2 = factors; 3 = both (simultaneous).
    for (Index ell = 0; ell < l; ++ell) {
      LagParams& lag = cur.lags[ell];
      Matrix gram_u = lag.u.transpose() * lag.u;
      Matrix gram_v = lag.v.transpose() * lag.v;
      if (sym_cond(gram_u) > cfg.gram_cond_limit ||
          sym_cond(gram_v) > cfg.gram_cond_limit)
        throw degenerate_factor_error(
            "scaled_gd: factor Gram matrix is numerically singular");
      double trace_gram = gram_u.cwiseProduct(gram_v).sum();
      double net_sq = lag.b_net_frob_sq(w);
      if (!(trace_gram > 0.0))
        throw degenerate_factor_error("scaled_gd: zero variable operator");
      if (!(net_sq > 0.0))
        throw degenerate_factor_error("scaled_gd: zero network operator");

      if (which & 1) {
        lag.beta_a -= cfg.eta * g[ell].beta_a / (trace_gram * n_nodes);
        lag.beta_n -= cfg.eta * g[ell].beta_n / (trace_gram * w.frob_sq);
      }
      if (which & 2) {
        lag.u -= cfg.eta / net_sq * g[ell].u * gram_v.ldlt().solve(
                     Matrix::Identity(gram_v.rows(), gram_v.cols()));
        lag.v -= cfg.eta / net_sq * g[ell].v * gram_u.ldlt().solve(
                     Matrix::Identity(gram_u.rows(), gram_u.cols()));
      }
    }
  };

  int consecutive_up = 0;
  for (Index iter = 1; iter <= cfg.max_iter; ++iter) {
    if (cfg.sequential_updates) {
      apply_block_updates(grads, p, 1);
      engine.loss_and_grads(p, grads);
      apply_block_updates(grads, p, 2);
    } else {
      apply_block_updates(grads, p, 3);
    }
    double cur_loss = engine.loss_and_grads(p, grads);
    result.loss_trace.push_back(cur_loss);
    result.iters = iter;

    double rel_change =
        std::abs(cur_loss - prev_loss) / std::max(prev_loss, 1e-300);
    if (rel_change < cfg.rel_tol || cur_loss <= loss_floor) {
      result.converged = true;
      prev_loss = cur_loss;
      break;
    }
    if (cur_loss > prev_loss * (1.0 + 1e-12) && cur_loss > loss_floor) {
      if (++consecutive_up >= 10)
        throw divergence_error(
            "scaled_gd: loss increased for 10 consecutive iterations; "
            "try a smaller step size eta");
    } else {
      consecutive_up = 0;
    }
    prev_loss = cur_loss;
  }

  result.params = balance(p, w);
  for (const LagParams& lag : result.params.lags)
    result.selected_ranks.push_back(lag.rank());
  return result;
}

Index rank_from_singvals(const Vector& singvals, double ridge) {
  if (singvals.size() < 2)
    throw input_error("rank_from_singvals: need at least two singular values");
  Index best = 1;
  double best_ratio = std::numeric_limits<double>::infinity();
  for (Index j = 1; j < singvals.size(); ++j) {
    double ratio = (singvals(j) + ridge) / (singvals(j - 1) + ridge);
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best = j;
    }
  }
  return best;
}

SelectionResult select_rank_detail(const PanelSeries& panel,
                                   const WeightMatrix& w, Index r_bar,
                                   const FitConfig& cfg, Rng& rng) {
  if (r_bar < 2 || r_bar > panel.vars)
    throw input_error("select_rank: need 2 <= r_bar <= D");
  const Index l = cfg.lag;
  std::vector<Index> bar_ranks(l, r_bar);

  ParamSet init = initialize(panel, w, bar_ranks, cfg, rng);
  SelectionResult sel;
  if (cfg.rank_select_als_only) {
    sel.fit.params = balance(init, w);
    sel.fit.init_params = init;
    sel.fit.converged = true;
    sel.fit.loss_trace.push_back(0.0);
  } else {
    sel.fit = scaled_gd(panel, w, init, cfg);
  }

  const Index t_eff = panel.total() - l;
  sel.ridge = cfg.ridge_factor *
              std::sqrt(static_cast<double>(panel.vars) *
                        std::log(static_cast<double>(t_eff)) /
                        static_cast<double>(t_eff));
  for (Index ell = 0; ell < l; ++ell) {
    Eigen::JacobiSVD<Matrix> svd(sel.fit.params.lags[ell].b_var());
    Vector sv = svd.singularValues().head(r_bar);
    sel.singvals.push_back(sv);
    sel.ranks.push_back(rank_from_singvals(sv, sel.ridge));
  }
  return sel;
}

std::vector<Index> select_rank(const PanelSeries& panel, const WeightMatrix& w,
                               Index r_bar, const FitConfig& cfg, Rng& rng) {
  return select_rank_detail(panel, w, r_bar, cfg, rng).ranks;
}

FitResult fit_rrnar(const PanelSeries& panel, const WeightMatrix& w,
                    const FitConfig& cfg, Rng& rng) {
  std::vector<Index> ranks;
  if (cfg.auto_ranks)
    ranks = select_rank(panel, w, cfg.resolved_r_bar(panel.vars), cfg, rng);
  else
    ranks = cfg.resolved_ranks(panel.vars);
  if (static_cast<Index>(ranks.size()) != cfg.lag)
    throw input_error("fit_rrnar: rank list length must equal lag order");

  ParamSet init = initialize(panel, w, ranks, cfg, rng);
  FitResult result = scaled_gd(panel, w, init, cfg);
  result.selected_ranks = ranks;
  return result;
}

}  // namespace rrnar
