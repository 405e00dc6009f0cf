#include "rrnar/eval.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace rrnar {

namespace {

void check_comparable(const ParamSet& fit, const ParamSet& truth) {
  if (fit.nodes != truth.nodes || fit.vars != truth.vars)
    throw shape_error("error metrics: dimension mismatch between fit and truth");
  if (fit.lag_order() != truth.lag_order())
    throw shape_error("error metrics: lag order mismatch");
}

double factor_inner(const LagParams& a, const LagParams& b) {
  // <UaVa^T, UbVb^T> = <Ua^T Ub, Va^T Vb>
  return (a.u.transpose() * b.u).cwiseProduct(a.v.transpose() * b.v).sum();
}

double net_inner(const LagParams& a, const LagParams& b,
                 const WeightMatrix& w) {
  return a.beta_a * b.beta_a * static_cast<double>(w.nodes()) +
         a.beta_n * b.beta_n * w.frob_sq;
}

Matrix orthonormal_basis(const Matrix& m) {
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  if (qr.rank() < m.cols())
    throw degenerate_factor_error(
        "projector_dist: input is rank-deficient");
  Eigen::HouseholderQR<Matrix> plain(m);
  return plain.householderQ() * Matrix::Identity(m.rows(), m.cols());
}

}  // namespace

double kron_error(const ParamSet& fit, const ParamSet& truth,
                  const WeightMatrix& w) {
  check_comparable(fit, truth);
  double total = 0.0;
  for (Index ell = 0; ell < fit.lag_order(); ++ell) {
    const LagParams& f = fit.lags[ell];
    const LagParams& t = truth.lags[ell];
    double sq = factor_inner(f, f) * net_inner(f, f, w) +
                factor_inner(t, t) * net_inner(t, t, w) -
                2.0 * factor_inner(f, t) * net_inner(f, t, w);
    total += std::max(sq, 0.0);
  }
  return std::sqrt(total);
}

double projector_dist(const Matrix& m1, const Matrix& m2) {
  if (m1.rows() != m2.rows())
    throw shape_error("projector_dist: ambient dimensions differ");
  Matrix q1 = orthonormal_basis(m1);
  Matrix q2 = orthonormal_basis(m2);
  return (q1 * q1.transpose() - q2 * q2.transpose()).norm();
}

AlignedError dist_upper(const ParamSet& fit, const ParamSet& truth,
                        const WeightMatrix& w) {
  check_comparable(fit, truth);
  for (Index ell = 0; ell < fit.lag_order(); ++ell)
    if (fit.lags[ell].rank() != truth.lags[ell].rank())
      throw rank_mismatch_error("dist_upper: per-lag ranks differ");

  ParamSet fit_bal = balance(fit, w);
  ParamSet truth_bal = balance(truth, w);

  AlignedError err;
  err.kron_err = kron_error(fit, truth, w);
  double dist_sq = 0.0;
  for (Index ell = 0; ell < fit.lag_order(); ++ell) {
    LagParams& f = fit_bal.lags[ell];
    const LagParams& t = truth_bal.lags[ell];
    const Index r = t.rank();

    // Canonical factors of the balanced truth: U* = L S^{1/2}, V* = R S^{1/2}.
    Eigen::JacobiSVD<Matrix> svd(t.b_var(),
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector sigma = svd.singularValues().head(r);
    Vector sqrt_sigma = sigma.cwiseSqrt();
    Matrix u_star = svd.matrixU().leftCols(r) * sqrt_sigma.asDiagonal();
    Matrix v_star = svd.matrixV().leftCols(r) * sqrt_sigma.asDiagonal();

    // Joint sign so the aligned beta_a matches the truth's sign.
    if ((t.beta_a >= 0.0) != (f.beta_a >= 0.0)) {
      f.beta_a = -f.beta_a;
      f.beta_n = -f.beta_n;
      f.u = -f.u;
    }

    // Q = argmin |U_hat Q - U*|_F, then V aligned by Q^{-T}.
    Matrix gram_u = f.u.transpose() * f.u;
    Matrix q = gram_u.ldlt().solve(f.u.transpose() * u_star);
    Eigen::PartialPivLU<Matrix> lu(q);
    if (std::abs(lu.determinant()) < 1e-300)
      throw degenerate_factor_error("dist_upper: alignment map is singular");
    Matrix u_aligned = f.u * q;
    Matrix v_aligned = lu.solve(f.v.transpose()).transpose();  // V Q^{-T}

    double net_star_sq = t.b_net_frob_sq(w);
    double var_star_sq = sigma.squaredNorm();
    double da = f.beta_a - t.beta_a;
    double dn = f.beta_n - t.beta_n;
    dist_sq += da * da * static_cast<double>(w.nodes()) * var_star_sq;
    dist_sq += dn * dn * w.frob_sq * var_star_sq;
    dist_sq += ((u_aligned - u_star) * sqrt_sigma.asDiagonal()).squaredNorm() *
               net_star_sq;
    dist_sq += ((v_aligned - v_star) * sqrt_sigma.asDiagonal()).squaredNorm() *
               net_star_sq;

    err.beta_a_err.push_back(da * da);
    err.beta_n_err.push_back(dn * dn);
    err.proj_u_err.push_back(projector_dist(f.u, u_star));
    err.proj_v_err.push_back(projector_dist(f.v, v_star));
  }
  err.dist_upper = std::sqrt(dist_sq);
  return err;
}

Matrix forecast(const ParamSet& params, const WeightMatrix& w,
                const std::vector<Matrix>& history) {
  const Index l = params.lag_order();
  if (static_cast<Index>(history.size()) < l)
    throw insufficient_data_error("forecast: history shorter than lag order");
  Matrix y_hat = Matrix::Zero(params.nodes, params.vars);
  for (Index ell = 0; ell < l; ++ell) {
    const Matrix& y_lag = history[history.size() - 1 - ell];
    const LagParams& lag = params.lags[ell];
    Matrix xb = y_lag * lag.v;          // avoid the D x D product
    Matrix pred = xb * lag.u.transpose();
    y_hat.noalias() += lag.beta_a * pred + lag.beta_n * (w.entries * pred);
  }
  return y_hat;
}

ForecastReport rolling_eval(const Fitter& fitter, const PanelSeries& panel,
                            double train_frac, Index refit_every) {
  if (!(train_frac > 0.0 && train_frac < 1.0))
    throw input_error("rolling_eval: train_frac must lie in (0, 1)");
  const Index total = panel.total();
  const Index n_train =
      static_cast<Index>(std::floor(train_frac * static_cast<double>(total)));
  if (n_train < 1 || n_train >= total)
    throw input_error("rolling_eval: empty train or test window");
  const Index n = panel.nodes, d = panel.vars;

  // Train-window per-variable statistics (standardization, no leakage).
  Vector mean = Vector::Zero(d), sd = Vector::Zero(d);
  const double count = static_cast<double>(n_train * n);
  for (Index t = 0; t < n_train; ++t) mean += panel.data[t].colwise().sum();
  mean /= count;
  for (Index t = 0; t < n_train; ++t)
    sd += (panel.data[t].rowwise() - mean.transpose()).colwise().squaredNorm();
  sd = (sd / count).cwiseSqrt();
  for (Index j = 0; j < d; ++j)
    if (sd(j) == 0.0) sd(j) = 1.0;

  auto train_window = [&](Index upto) {
    PanelSeries train;
    train.nodes = n;
    train.vars = d;
    train.data.assign(panel.data.begin(), panel.data.begin() + upto);
    return train;
  };

  Forecaster model = fitter(train_window(n_train));
  ForecastReport report;
  report.per_variable_mse.assign(d, 0.0);
  report.n_forecasts = total - n_train;
  std::vector<double> standardized_sq;
  standardized_sq.reserve(static_cast<size_t>(report.n_forecasts * n * d));

  std::vector<Matrix> history;
  for (Index t = n_train; t < total; ++t) {
    Index offset = t - n_train;
    if (refit_every > 0 && offset > 0 && offset % refit_every == 0)
      model = fitter(train_window(t));
    history.assign(panel.data.begin() + std::max<Index>(0, t - model.lag),
                   panel.data.begin() + t);
    Matrix err = panel.data[t] - model.predict(history);
    for (Index j = 0; j < d; ++j) {
      report.per_variable_mse[j] += err.col(j).squaredNorm();
      for (Index i = 0; i < n; ++i) {
        double z = err(i, j) / sd(j);
        standardized_sq.push_back(z * z);
      }
    }
  }

  const double denom = static_cast<double>(report.n_forecasts * n);
  for (Index j = 0; j < d; ++j) report.per_variable_mse[j] /= denom;
  double sum = 0.0;
  for (double v : standardized_sq) sum += v;
  report.global_mse = sum / static_cast<double>(standardized_sq.size());
  std::nth_element(standardized_sq.begin(),
                   standardized_sq.begin() + standardized_sq.size() / 2,
                   standardized_sq.end());
  double hi = standardized_sq[standardized_sq.size() / 2];
  if (standardized_sq.size() % 2 == 0) {
    double lo = *std::max_element(
        standardized_sq.begin(),
        standardized_sq.begin() + standardized_sq.size() / 2);
    report.median_se = 0.5 * (lo + hi);
  } else {
    report.median_se = hi;
  }
  return report;
}

Fitter make_rrnar_fitter(const WeightMatrix& w, FitConfig cfg) {
  return [w, cfg](const PanelSeries& train) {
    Rng rng(cfg.seed);
    FitResult fit = fit_rrnar(train, w, cfg, rng);
    ParamSet params = fit.params;
    return Forecaster{cfg.lag, [params, w](const std::vector<Matrix>& h) {
                        return forecast(params, w, h);
                      }};
  };
}

}  // namespace rrnar
