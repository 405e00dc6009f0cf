#include "rrnar/dgp.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <string>

#include "rrnar/graph.hpp"
#include "rrnar/kronecker.hpp"
#include "rrnar/spectral.hpp"

namespace rrnar {

namespace {

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  // Column-major fill so the draw order matches the vec convention.
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

// Haar-distributed D x r frame: QR of a Gaussian matrix with the R diagonal
// sign fixed.
Matrix haar_frame(Index dim, Index rank, Rng& rng) {
  Matrix g = gaussian_matrix(dim, rank, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, rank);
  Matrix r = qr.matrixQR().topRows(rank).triangularView<Eigen::Upper>();
  for (Index j = 0; j < rank; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Matrix draw_noise(const DgpConfig& config, Rng& rng) {
  Matrix e = gaussian_matrix(config.dims.nodes, config.dims.vars, rng);
  if (config.noise.has_entry_sd()) e = e.cwiseProduct(config.noise.entry_sd);
  return config.noise.scale * e;
}

}  // namespace

void DgpConfig::validate() const {
  dims.validate();
  if (t < 1) throw input_error("DgpConfig: T >= 1 required");
  if (burn_in < 0) throw input_error("DgpConfig: burn_in >= 0 required");
  if (!(singular_low > 0.0) || singular_low > singular_high)
    throw input_error("DgpConfig: need 0 < singular_low <= singular_high");
  if (noise.has_entry_sd() &&
      (noise.entry_sd.rows() != dims.nodes || noise.entry_sd.cols() != dims.vars))
    throw shape_error("DgpConfig: entry_sd must be N x D");
}

std::pair<bool, double> check_stationary(const ParamSet& params,
                                         const WeightMatrix& w) {
  double total = 0.0;
  for (const LagParams& lag : params.lags) {
    double rho_net = spectral_radius(lag.b_net(w));
    double rho_var = spectral_radius(lag.b_var());
    total += rho_net * rho_var;
  }
  return {total < 1.0, total};
}

double companion_radius(const ParamSet& params, const WeightMatrix& w) {
  const Index nd = params.nodes * params.vars;
  const Index l = params.lag_order();
  if (l == 1)
    return spectral_radius(params.lags[0].b_var()) *
           spectral_radius(params.lags[0].b_net(w));
  Matrix companion = Matrix::Zero(l * nd, l * nd);
  for (Index ell = 0; ell < l; ++ell)
    companion.block(0, ell * nd, nd, nd) =
        kron(params.lags[ell].b_var(), params.lags[ell].b_net(w));
  companion.block(nd, 0, (l - 1) * nd, (l - 1) * nd) =
      Matrix::Identity((l - 1) * nd, (l - 1) * nd);
  return spectral_radius(companion);
}

TrueModel sample_params(const DgpConfig& config, Rng& rng) {
  config.validate();
  const ModelDims& dims = config.dims;

  TrueModel model;
  model.weight = row_normalize(build_k_regular_cycle(dims.nodes, config.k));

  constexpr int kMaxDraws = 10000;
  for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
    ParamSet params;
    params.nodes = dims.nodes;
    params.vars = dims.vars;
    for (Index ell = 0; ell < dims.lag; ++ell) {
      LagParams lag;
      lag.beta_a = rng.uniform();
      lag.beta_n = rng.uniform();
      const Index r = dims.ranks[ell];
      Matrix q1 = haar_frame(dims.vars, r, rng);
      Matrix q2 = haar_frame(dims.vars, r, rng);
      Vector lambda(r);
      for (Index i = 0; i < r; ++i)
        lambda(i) = rng.uniform(config.singular_low, config.singular_high);
      // B_var = Q1 Lambda Q2^T; stored in the balanced-factor convention
      // U = L Sigma^{1/2}, V = R Sigma^{1/2} of its compact SVD.
      Matrix b_var = q1 * lambda.asDiagonal() * q2.transpose();
      Eigen::JacobiSVD<Matrix> svd(b_var,
                                   Eigen::ComputeThinU | Eigen::ComputeThinV);
      Vector sqrt_sigma = svd.singularValues().head(r).cwiseSqrt();
      lag.u = svd.matrixU().leftCols(r) * sqrt_sigma.asDiagonal();
      lag.v = svd.matrixV().leftCols(r) * sqrt_sigma.asDiagonal();
      params.lags.push_back(std::move(lag));
    }

    auto [ok, value] = check_stationary(params, model.weight);
    if (ok && config.exact_companion_check && dims.lag > 1)
      ok = companion_radius(params, model.weight) < 1.0;
    if (ok) {
      model.params = std::move(params);
      model.rho = dims.lag == 1 ? value : companion_radius(model.params, model.weight);
      return model;
    }
  }
  throw infeasible_config_error(
      "sample_params: stationarity rejection exceeded " +
      std::to_string(kMaxDraws) + " draws");
}

PanelSeries simulate(const TrueModel& model, const DgpConfig& config, Rng& rng) {
  config.validate();
  const Index n = config.dims.nodes;
  const Index d = config.dims.vars;
  const Index l = config.dims.lag;
  const Index keep = config.t + l;
  const Index steps = config.burn_in + keep;

  std::vector<Matrix> states;
  states.reserve(l + steps);
  for (Index i = 0; i < l; ++i) {
    Matrix init = Matrix::Zero(n, d);
    if (config.init_scale != 0.0)
      init = config.init_scale * gaussian_matrix(n, d, rng);
    states.push_back(std::move(init));
  }

  std::vector<Matrix> b_net(l), b_var_t(l);
  for (Index ell = 0; ell < l; ++ell) {
    b_net[ell] = model.params.lags[ell].b_net(model.weight);
    b_var_t[ell] = model.params.lags[ell].b_var().transpose();
  }

  for (Index step = 0; step < steps; ++step) {
    Matrix y = draw_noise(config, rng);
    const Index cur = static_cast<Index>(states.size());
    for (Index ell = 0; ell < l; ++ell)
      y.noalias() += b_net[ell] * states[cur - 1 - ell] * b_var_t[ell];
    states.push_back(std::move(y));
  }

  PanelSeries panel;
  panel.nodes = n;
  panel.vars = d;
  panel.data.assign(states.end() - keep, states.end());
  return panel;
}

}  // namespace rrnar
