#include "rrnar/baselines.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "rrnar/estimator.hpp"

namespace rrnar {

namespace {

double sym_cond(const Matrix& gram) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues().minCoeff();
  double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

Matrix solve_gram(Matrix gram, const Matrix& rhs, double cond_limit,
                  const char* what) {
  if (sym_cond(gram) > cond_limit) {
    double eps = 1e-10 * gram.trace() / static_cast<double>(gram.rows());
    gram += eps * Matrix::Identity(gram.rows(), gram.cols());
    if (!(eps > 0.0) || sym_cond(gram) > cond_limit)
      throw collinear_design_error(std::string(what) + ": degenerate design");
  }
  return gram.ldlt().solve(rhs);
}

void require_two_obs(const PanelSeries& panel, const char* what) {
  if (panel.total() < 2)
    throw insufficient_data_error(std::string(what) +
                                  ": need at least two observations");
}

}  // namespace

NarParams fit_nar(const PanelSeries& panel, const WeightMatrix& w,
                  double cond_limit) {
  require_two_obs(panel, "fit_nar");
  const Index n = panel.nodes, d = panel.vars, total = panel.total();
  NarParams out;
  out.betas.resize(d);
  for (Index j = 0; j < d; ++j) {
    double s_xx = 0, s_xz = 0, s_zz = 0, s_xy = 0, s_zy = 0;
    for (Index t = 1; t < total; ++t) {
      Vector x = panel.data[t - 1].col(j);
      Vector z = w.entries * x;
      Vector y = panel.data[t].col(j);
      s_xx += x.squaredNorm();
      s_xz += x.dot(z);
      s_zz += z.squaredNorm();
      s_xy += x.dot(y);
      s_zy += z.dot(y);
    }
    Matrix gram(2, 2);
    gram << s_xx, s_xz, s_xz, s_zz;
    if (gram.trace() == 0.0) {
      out.betas[j] = {0.0, 0.0};  // all-zero channel
      continue;
    }
    Vector rhs(2);
    rhs << s_xy, s_zy;
    Vector beta = solve_gram(gram, rhs, cond_limit, "fit_nar");
    out.betas[j] = {beta(0), beta(1)};
  }
  (void)n;
  return out;
}

Matrix forecast_nar(const NarParams& params, const WeightMatrix& w,
                    const Matrix& y_last) {
  Matrix y_hat(y_last.rows(), y_last.cols());
  Matrix wy = w.entries * y_last;
  for (Index j = 0; j < y_last.cols(); ++j)
    y_hat.col(j) =
        params.betas[j].first * y_last.col(j) + params.betas[j].second * wy.col(j);
  return y_hat;
}

Matrix nar_transition(const NarParams& params, const WeightMatrix& w,
                      Index variable) {
  const auto& [a, b] = params.betas.at(static_cast<size_t>(variable));
  return a * Matrix::Identity(w.nodes(), w.nodes()) + b * w.entries;
}

Matrix fit_rrvar(const PanelSeries& panel, Index rank, double cond_limit) {
  require_two_obs(panel, "fit_rrvar");
  const Index nd = panel.nodes * panel.vars;
  const Index t_eff = panel.total() - 1;
  Matrix x(t_eff, nd), y(t_eff, nd);
  for (Index t = 0; t < t_eff; ++t) {
    x.row(t) = Eigen::Map<const Vector>(panel.data[t].data(), nd);
    y.row(t) = Eigen::Map<const Vector>(panel.data[t + 1].data(), nd);
  }
  return rrr_solve(x, y, rank, cond_limit);
}

MarParams fit_mar(const PanelSeries& panel, Index iters, double cond_limit) {
  if (iters < 1) throw input_error("fit_mar: iters must be >= 1");
  require_two_obs(panel, "fit_mar");
  const Index n = panel.nodes, d = panel.vars, total = panel.total();

  MarParams p;
  p.a = Matrix::Identity(n, n);
  p.b = Matrix::Identity(d, d);
  for (Index sweep = 0; sweep < iters; ++sweep) {
    // A given B: regress Y_t on M_t = Y_{t-1} B^T.
    Matrix s_mm = Matrix::Zero(n, n), s_ym = Matrix::Zero(n, n);
    for (Index t = 1; t < total; ++t) {
      Matrix m = panel.data[t - 1] * p.b.transpose();
      s_mm.noalias() += m * m.transpose();
      s_ym.noalias() += panel.data[t] * m.transpose();
    }
    p.a = solve_gram(s_mm, s_ym.transpose(), cond_limit, "fit_mar").transpose();

    // B given A: regress Y_t^T on P_t^T with P_t = A Y_{t-1}.
    Matrix s_pp = Matrix::Zero(d, d), s_yp = Matrix::Zero(d, d);
    for (Index t = 1; t < total; ++t) {
      Matrix pt = p.a * panel.data[t - 1];
      s_pp.noalias() += pt.transpose() * pt;
      s_yp.noalias() += panel.data[t].transpose() * pt;
    }
    p.b = solve_gram(s_pp, s_yp.transpose(), cond_limit, "fit_mar").transpose();
  }

  double na = p.a.norm(), nb = p.b.norm();
  if (na > 0.0 && nb > 0.0) {
    double s = std::sqrt(na / nb);
    p.a /= s;
    p.b *= s;
    Index imax = 0;
    for (Index i = 1; i < n; ++i)
      if (std::abs(p.a(i, i)) > std::abs(p.a(imax, imax))) imax = i;
    if (p.a(imax, imax) < 0.0) {
      p.a = -p.a;
      p.b = -p.b;
    }
  }
  return p;
}

Fitter make_nar_fitter(const WeightMatrix& w) {
  return [w](const PanelSeries& train) {
    NarParams params = fit_nar(train, w);
    return Forecaster{1, [params, w](const std::vector<Matrix>& h) {
                        return forecast_nar(params, w, h.back());
                      }};
  };
}

Fitter make_rrvar_fitter(Index rank) {
  return [rank](const PanelSeries& train) {
    Matrix coef = fit_rrvar(train, rank);
    const Index n = train.nodes, d = train.vars;
    return Forecaster{1, [coef, n, d](const std::vector<Matrix>& h) {
                        Vector y = coef * Eigen::Map<const Vector>(
                                              h.back().data(), n * d);
                        return Matrix(Eigen::Map<const Matrix>(y.data(), n, d));
                      }};
  };
}

Fitter make_mar_fitter(Index iters) {
  return [iters](const PanelSeries& train) {
    MarParams params = fit_mar(train, iters);
    return Forecaster{1, [params](const std::vector<Matrix>& h) {
                        return Matrix(params.a * h.back() *
                                      params.b.transpose());
                      }};
  };
}

}  // namespace rrnar
