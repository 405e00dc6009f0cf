#include "rrnar/objective.hpp"

#include <string>

#include "rrnar/kronecker.hpp"

namespace rrnar {

namespace {

using ConstMap = Eigen::Map<const Matrix>;

ConstMap slice(const Matrix& stacked, Index col, Index offset, Index n,
               Index d) {
  return ConstMap(stacked.col(col).data() + offset, n, d);
}

void check_shapes(const ParamSet& params, const WeightMatrix& w,
                  const StackedData& data) {
  if (params.nodes != data.nodes || params.vars != data.vars)
    throw shape_error("params and stacked data disagree on (N, D)");
  if (params.lag_order() != data.lag)
    throw shape_error("params and stacked data disagree on lag order");
  if (w.nodes() != data.nodes)
    throw shape_error("weight matrix does not match data");
  if (data.y.rows() != data.nodes * data.vars || data.y.cols() != data.t_eff)
    throw shape_error("stacked y has wrong shape");
  if (data.x.rows() != data.lag * data.nodes * data.vars ||
      data.x.cols() != data.t_eff)
    throw shape_error("stacked x has wrong shape");
  for (const LagParams& lag : params.lags) {
    if (lag.u.rows() != params.vars || lag.v.rows() != params.vars ||
        lag.u.cols() != lag.v.cols())
      throw shape_error("factor shapes inconsistent with D");
  }
}

// Residual columns R_t = Y_t - sum_l B_net_l Y_{t-l} B_var_l^T as an
// ND x T matrix.
Matrix residual_matrix(const ParamSet& params, const WeightMatrix& w,
                       const StackedData& data) {
  const Index n = data.nodes, d = data.vars, nd = n * d;
  std::vector<Matrix> b_net(params.lag_order()), b_var_t(params.lag_order());
  for (Index ell = 0; ell < params.lag_order(); ++ell) {
    b_net[ell] = params.lags[ell].b_net(w);
    b_var_t[ell] = params.lags[ell].b_var().transpose();
  }
  Matrix res = data.y;
  for (Index t = 0; t < data.t_eff; ++t) {
    Eigen::Map<Matrix> r_t(res.col(t).data(), n, d);
    for (Index ell = 0; ell < params.lag_order(); ++ell)
      r_t.noalias() -= b_net[ell] * slice(data.x, t, ell * nd, n, d) * b_var_t[ell];
  }
  return res;
}

}  // namespace

StackedData stack_lag(const PanelSeries& panel, Index lag) {
  if (lag < 1) throw input_error("stack_lag: lag order must be >= 1");
  if (panel.total() < lag + 1)
    throw insufficient_data_error(
        "stack_lag: need at least L+1 observations, got " +
        std::to_string(panel.total()));
  const Index n = panel.nodes, d = panel.vars, nd = n * d;
  const Index t_eff = panel.total() - lag;
  StackedData out;
  out.nodes = n;
  out.vars = d;
  out.lag = lag;
  out.t_eff = t_eff;
  out.y.resize(nd, t_eff);
  out.x.resize(lag * nd, t_eff);
  for (Index t = 0; t < t_eff; ++t) {
    out.y.col(t) = Eigen::Map<const Vector>(panel.data[lag + t].data(), nd);
    for (Index ell = 1; ell <= lag; ++ell)
      out.x.col(t).segment((ell - 1) * nd, nd) =
          Eigen::Map<const Vector>(panel.data[lag + t - ell].data(), nd);
  }
  return out;
}

double loss(const ParamSet& params, const WeightMatrix& w,
            const StackedData& data) {
  check_shapes(params, w, data);
  return residual_matrix(params, w, data).squaredNorm() /
         (2.0 * static_cast<double>(data.t_eff));
}

Matrix grad_A(const ParamSet& params, const WeightMatrix& w,
              const StackedData& data) {
  check_shapes(params, w, data);
  Matrix res = residual_matrix(params, w, data);
  return -(res * data.x.transpose()) / static_cast<double>(data.t_eff);
}

GradientSet grad_blocks(const ParamSet& params, const WeightMatrix& w,
                        const StackedData& data) {
  check_shapes(params, w, data);
  const Index n = data.nodes, d = data.vars, nd = n * d;
  const double inv_t = 1.0 / static_cast<double>(data.t_eff);
  Matrix res = residual_matrix(params, w, data);

  GradientSet out;
  out.lags.resize(params.lag_order());
  for (Index ell = 0; ell < params.lag_order(); ++ell) {
    const LagParams& lag = params.lags[ell];
    Matrix b_net = lag.b_net(w);
    Matrix b_var = lag.b_var();
    Matrix g_bnet = Matrix::Zero(n, n);
    Matrix g_bvar = Matrix::Zero(d, d);
    for (Index t = 0; t < data.t_eff; ++t) {
      ConstMap r_t(res.col(t).data(), n, d);
      ConstMap y_lag = slice(data.x, t, ell * nd, n, d);
      g_bvar.noalias() -= r_t.transpose() * (b_net * y_lag);
      g_bnet.noalias() -= r_t * (y_lag * b_var.transpose()).transpose();
    }
    g_bnet *= inv_t;
    g_bvar *= inv_t;

    GradientSet::Lag& g = out.lags[ell];
    g.b_net = g_bnet;
    g.b_var = g_bvar;
    g.beta_a = g_bnet.trace();  // <I_N, g_bnet>
    g.beta_n = w.entries.cwiseProduct(g_bnet).sum();
    g.u = g_bvar * lag.v;
    g.v = g_bvar.transpose() * lag.u;
  }
  return out;
}

GradientSet grad_blocks_rearranged(const ParamSet& params,
                                   const WeightMatrix& w,
                                   const StackedData& data) {
  const Index n = data.nodes, d = data.vars, nd = n * d;
  Matrix ga = grad_A(params, w, data);

  GradientSet out;
  out.lags.resize(params.lag_order());
  for (Index ell = 0; ell < params.lag_order(); ++ell) {
    const LagParams& lag = params.lags[ell];
    Matrix rearranged = rearrange_P(ga.middleCols(ell * nd, nd), n, d);
    Vector vec_bvar = vec(lag.b_var());
    Vector vec_bnet = vec(lag.b_net(w));

    GradientSet::Lag& g = out.lags[ell];
    g.b_net = unvec(rearranged.transpose() * vec_bvar, n, n);
    g.b_var = unvec(rearranged * vec_bnet, d, d);
    g.beta_a = g.b_net.trace();
    g.beta_n = w.entries.cwiseProduct(g.b_net).sum();
    g.u = g.b_var * lag.v;
    g.v = g.b_var.transpose() * lag.u;
  }
  return out;
}

FitEngine::FitEngine(const PanelSeries& panel, const WeightMatrix& w,
                     Index lag)
    : nodes_(panel.nodes), vars_(panel.vars), lag_(lag) {
  if (lag < 1) throw input_error("FitEngine: lag order must be >= 1");
  if (panel.total() < lag + 1)
    throw insufficient_data_error("FitEngine: panel too short for lag order");
  if (w.nodes() != nodes_) throw shape_error("FitEngine: weight/panel mismatch");
  t_eff_ = panel.total() - lag;

  const Index n = nodes_, d = vars_;
  y_stack_.resize(t_eff_ * n, d);
  x_stack_.assign(lag, Matrix(t_eff_ * n, d));
  wx_stack_.assign(lag, Matrix(t_eff_ * n, d));
  for (Index t = 0; t < t_eff_; ++t) {
    y_stack_.middleRows(t * n, n) = panel.data[lag + t];
    for (Index ell = 0; ell < lag; ++ell) {
      const Matrix& y_lag = panel.data[lag + t - 1 - ell];
      x_stack_[ell].middleRows(t * n, n) = y_lag;
      wx_stack_[ell].middleRows(t * n, n).noalias() = w.entries * y_lag;
    }
  }
  residual_.resize(t_eff_ * n, d);
  xv_.resize(lag);
  wxv_.resize(lag);
}

void FitEngine::accumulate_residual(const ParamSet& params) {
  residual_ = y_stack_;
  for (Index ell = 0; ell < lag_; ++ell) {
    const LagParams& lag = params.lags[ell];
    xv_[ell].noalias() = x_stack_[ell] * lag.v;
    wxv_[ell].noalias() = wx_stack_[ell] * lag.v;
    residual_.noalias() -=
        (lag.beta_a * xv_[ell] + lag.beta_n * wxv_[ell]) * lag.u.transpose();
  }
}

double FitEngine::loss_and_grads(const ParamSet& params,
                                 std::vector<Blocks>& grads) {
  if (params.nodes != nodes_ || params.vars != vars_ ||
      params.lag_order() != lag_)
    throw shape_error("FitEngine: params do not match design");
  const double inv_t = 1.0 / static_cast<double>(t_eff_);
  accumulate_residual(params);

  grads.resize(lag_);
  for (Index ell = 0; ell < lag_; ++ell) {
    const LagParams& lag = params.lags[ell];
    ru_.noalias() = residual_ * lag.u;
    Blocks& g = grads[ell];
    g.beta_a = -inv_t * xv_[ell].cwiseProduct(ru_).sum();
    g.beta_n = -inv_t * wxv_[ell].cwiseProduct(ru_).sum();
    g.u = -inv_t * (lag.beta_a * (residual_.transpose() * xv_[ell]) +
                    lag.beta_n * (residual_.transpose() * wxv_[ell]));
    g.v = -inv_t * (lag.beta_a * (x_stack_[ell].transpose() * ru_) +
                    lag.beta_n * (wx_stack_[ell].transpose() * ru_));
  }
  return residual_.squaredNorm() * (0.5 * inv_t);
}

double FitEngine::loss_at(const ParamSet& params) {
  if (params.nodes != nodes_ || params.vars != vars_ ||
      params.lag_order() != lag_)
    throw shape_error("FitEngine: params do not match design");
  accumulate_residual(params);
  return residual_.squaredNorm() / (2.0 * static_cast<double>(t_eff_));
}

}  // namespace rrnar
