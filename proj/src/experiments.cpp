#include "rrnar/experiments.hpp"

#include <Eigen/SVD>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "rrnar/dgp.hpp"
#include "rrnar/graph.hpp"
#include "rrnar/io.hpp"
#include "rrnar/rng.hpp"
#include "rrnar/spectral.hpp"

namespace rrnar {

void parallel_for(Index total, int workers,
                  const std::function<void(Index)>& fn) {
  if (workers <= 1 || total <= 1) {
    for (Index i = 0; i < total; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&]() {
    while (true) {
      Index i = next.fetch_add(1);
      if (i >= total) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(total);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  int count = std::min<Index>(workers, total);
  pool.reserve(count);
  for (int i = 0; i < count; ++i) pool.emplace_back(body);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw input_error("fit_slope: need at least two matched points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  double vxx = sxx - sx * sx / n;
  double vxy = sxy - sx * sy / n;
  double vyy = syy - sy * sy / n;
  if (vxx <= 0.0) throw input_error("fit_slope: degenerate abscissa");
  SlopeFit fit;
  fit.slope = vxy / vxx;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.r_squared = vyy > 0.0 ? (vxy * vxy) / (vxx * vyy) : 1.0;
  return fit;
}

namespace {

struct CellKey {
  Index n, d, r, t;
};

std::vector<CellKey> rank_grid(const McRankConfig& cfg) {
  std::vector<CellKey> cells;
  for (Index n : cfg.n_list)
    for (Index d : cfg.d_list)
      for (Index r : cfg.r_list)
        for (Index t : cfg.t_list) cells.push_back({n, d, r, t});
  if (cells.empty()) throw input_error("mc-rank: empty grid");
  return cells;
}

}  // namespace

std::vector<McRankRow> run_mc_rank(const McRankConfig& cfg) {
  if (cfg.reps < 1) throw input_error("mc-rank: reps >= 1 required");
  std::vector<CellKey> cells = rank_grid(cfg);

  std::ofstream out;
  if (!cfg.output_csv.empty()) {
    out.open(cfg.output_csv);
    if (!out) throw io_error("cannot open " + cfg.output_csv);
    out << "n,d,r,t,reps,correct,frequency\n";
  }

  std::vector<McRankRow> rows;
  for (size_t cell = 0; cell < cells.size(); ++cell) {
    const CellKey& key = cells[cell];
    std::vector<char> correct(cfg.reps, 0);
    parallel_for(cfg.reps, cfg.parallelism, [&](Index rep) {
      Rng rng(child_seed(cfg.seed, cell, rep));
      DgpConfig dgp;
      dgp.dims = {key.n, key.d, 1, {key.r}};
      dgp.t = key.t;
      dgp.burn_in = cfg.burn_in;
      dgp.k = std::min(cfg.k, key.n - 1);
      TrueModel model = sample_params(dgp, rng);
      PanelSeries panel = simulate(model, dgp, rng);

      FitConfig fit = cfg.fit;
      fit.lag = 1;
      Index r_bar = cfg.r_bar > 0 ? cfg.r_bar : fit.resolved_r_bar(key.d);
      std::vector<Index> picked =
          select_rank(panel, model.weight, r_bar, fit, rng);
      correct[rep] = picked[0] == key.r ? 1 : 0;
    });
    Index hits = 0;
    for (char c : correct) hits += c;
    McRankRow row{key.n,    key.d, key.r,
                  key.t,    cfg.reps, hits,
                  static_cast<double>(hits) / static_cast<double>(cfg.reps)};
    rows.push_back(row);
    if (out.is_open()) {
      out << row.n << ',' << row.d << ',' << row.r << ',' << row.t << ','
          << row.reps << ',' << row.correct << ',' << fmt_g17(row.frequency)
          << '\n';
      out.flush();  // partial results survive an interrupted grid
    }
  }
  return rows;
}

void McRatesConfig::apply_kind_defaults() {
  switch (kind) {
    case RatesKind::VaryN:
      if (d == 0) d = 6;
      if (r == 0) r = 2;
      if (t == 0) t = 500;
      if (grid.empty()) grid = {10, 15, 23, 36, 56, 86, 132, 200};
      break;
    case RatesKind::VaryD:
      if (n == 0) n = 15;
      if (r == 0) r = 3;
      if (t == 0) t = 500;
      if (grid.empty()) grid = {5, 8, 13, 22, 38, 65, 112, 200};
      break;
    case RatesKind::VaryT:
      if (n == 0) n = 50;
      if (d == 0) d = 30;
      if (r == 0) r = 3;
      if (grid.empty()) grid = {100, 250, 630, 1600, 4000, 10000};
      break;
  }
}

namespace {

struct RepErrors {
  double beta_a_sq, beta_n_sq, proj_u_sq, proj_v_sq, kron_sq;
};

// Truth draw for the rate experiments: scalars held fixed, variable operator
// Q1 Lambda Q2^T with Haar frames; the spectrum comes from lambda_rng so
// vary-D can pin it across cells within a replication.
TrueModel rates_truth(Index n, Index d, Index r, Index k, double beta_a,
                      double beta_n, Rng& rng, Rng& lambda_rng) {
  TrueModel model;
  model.weight = row_normalize(build_k_regular_cycle(n, k));
  Vector lambda(r);
  for (Index i = 0; i < r; ++i) lambda(i) = lambda_rng.uniform(0.5, 1.5);

  for (int attempt = 0; attempt < 10000; ++attempt) {
    Matrix g1(d, r), g2(d, r);
    for (Index j = 0; j < r; ++j) {
      for (Index i = 0; i < d; ++i) g1(i, j) = rng.normal();
    }
    for (Index j = 0; j < r; ++j) {
      for (Index i = 0; i < d; ++i) g2(i, j) = rng.normal();
    }
    auto thin_q = [](Matrix& g) {
      Eigen::HouseholderQR<Matrix> qr(g);
      Matrix q = qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
      Matrix rr = qr.matrixQR()
                      .topRows(g.cols())
                      .triangularView<Eigen::Upper>();
      for (Index j = 0; j < g.cols(); ++j)
        if (rr(j, j) < 0.0) q.col(j) = -q.col(j);
      return q;
    };
    Matrix b_var =
        thin_q(g1) * lambda.asDiagonal() * thin_q(g2).transpose();

    ParamSet params;
    params.nodes = n;
    params.vars = d;
    LagParams lag;
    lag.beta_a = beta_a;
    lag.beta_n = beta_n;
    std::tie(lag.u, lag.v) = factor_split(b_var, r);
    params.lags.push_back(std::move(lag));

    auto [ok, value] = check_stationary(params, model.weight);
    if (ok) {
      model.params = std::move(params);
      model.rho = value;
      return model;
    }
  }
  throw infeasible_config_error(
      "mc-rates: stationarity rejection exceeded 10000 draws");
}

RepErrors one_rates_rep(const McRatesConfig& cfg, Index n, Index d, Index t,
                        Index k, std::uint64_t seed, Index rep) {
  Rng rng(seed);
  Rng lambda_rng(cfg.kind == RatesKind::VaryD
                     ? child_seed(cfg.seed, 0x4C414D42 /* spectrum stream */, rep)
                     : seed);
  if (cfg.kind != RatesKind::VaryD) {
    // Same stream: burn the spectrum draws off the main generator.
    lambda_rng = Rng(rng.next_u64());
  }
  TrueModel model = rates_truth(n, d, cfg.r, k, cfg.beta_a_true,
                                cfg.beta_n_true, rng, lambda_rng);

  DgpConfig dgp;
  dgp.dims = {n, d, 1, {cfg.r}};
  dgp.t = t;
  dgp.burn_in = cfg.burn_in;
  dgp.k = k;
  PanelSeries panel = simulate(model, dgp, rng);

  FitConfig fit = cfg.fit;
  fit.lag = 1;
  fit.ranks = {cfg.r};
  fit.auto_ranks = false;
  ParamSet init = initialize(panel, model.weight, fit.ranks, fit, rng);
  FitResult result = scaled_gd(panel, model.weight, init, fit);

  AlignedError err = dist_upper(result.params, model.params, model.weight);
  ParamSet truth_bal = balance(model.params, model.weight);
  double phi_sq = truth_bal.lags[0].b_net_frob_sq(model.weight);
  Eigen::JacobiSVD<Matrix> svd(truth_bal.lags[0].b_var());
  double sigma_r = svd.singularValues()(cfg.r - 1);

  RepErrors e;
  e.beta_a_sq = err.beta_a_err[0] * phi_sq;
  e.beta_n_sq = err.beta_n_err[0] * phi_sq;
  e.proj_u_sq = err.proj_u_err[0] * err.proj_u_err[0] * phi_sq * sigma_r * sigma_r;
  e.proj_v_sq = err.proj_v_err[0] * err.proj_v_err[0] * phi_sq * sigma_r * sigma_r;
  e.kron_sq = err.kron_err * err.kron_err;
  return e;
}

}  // namespace

McRatesResult run_mc_rates(const McRatesConfig& base) {
  McRatesConfig cfg = base;
  cfg.apply_kind_defaults();
  if (cfg.reps < 1) throw input_error("mc-rates: reps >= 1 required");
  if (cfg.grid.empty()) throw input_error("mc-rates: empty grid");

  McRatesResult result;
  std::vector<double> log_x;
  for (size_t cell = 0; cell < cfg.grid.size(); ++cell) {
    Index n = cfg.n, d = cfg.d, t = cfg.t;
    switch (cfg.kind) {
      case RatesKind::VaryN: n = cfg.grid[cell]; break;
      case RatesKind::VaryD: d = cfg.grid[cell]; break;
      case RatesKind::VaryT: t = cfg.grid[cell]; break;
    }
    Index k = cfg.dense ? std::max<Index>(1, n / 2) : std::min<Index>(3, n - 1);

    std::vector<RepErrors> errors(cfg.reps);
    parallel_for(cfg.reps, cfg.parallelism, [&](Index rep) {
      errors[rep] =
          one_rates_rep(cfg, n, d, t, k, child_seed(cfg.seed, cell, rep), rep);
    });

    McRatesRow row{n, d, cfg.r, t, k, cfg.reps, 0, 0, 0, 0, 0};
    for (const RepErrors& e : errors) {
      row.beta_a_sq += e.beta_a_sq;
      row.beta_n_sq += e.beta_n_sq;
      row.proj_u_sq += e.proj_u_sq;
      row.proj_v_sq += e.proj_v_sq;
      row.kron_sq += e.kron_sq;
    }
    const double inv = 1.0 / static_cast<double>(cfg.reps);
    row.beta_a_sq *= inv;
    row.beta_n_sq *= inv;
    row.proj_u_sq *= inv;
    row.proj_v_sq *= inv;
    row.kron_sq *= inv;
    result.rows.push_back(row);

    double x = cfg.kind == RatesKind::VaryN
                   ? static_cast<double>(n)
                   : cfg.kind == RatesKind::VaryD ? static_cast<double>(d)
                                                  : static_cast<double>(t);
    log_x.push_back(std::log(x));
  }

  auto slope_of = [&](auto member) {
    std::vector<double> log_y;
    for (const McRatesRow& row : result.rows)
      log_y.push_back(std::log(row.*member));
    return fit_slope(log_x, log_y);
  };
  result.slopes["beta_a"] = slope_of(&McRatesRow::beta_a_sq);
  result.slopes["beta_n"] = slope_of(&McRatesRow::beta_n_sq);
  result.slopes["proj_u"] = slope_of(&McRatesRow::proj_u_sq);
  result.slopes["proj_v"] = slope_of(&McRatesRow::proj_v_sq);
  result.slopes["kron"] = slope_of(&McRatesRow::kron_sq);

  if (!cfg.output_prefix.empty()) {
    // Raw table; *_smooth columns carry a centered window-3 moving average,
    // a plotting convenience only.
    std::ofstream out(cfg.output_prefix + "_rates.csv");
    if (!out) throw io_error("cannot open " + cfg.output_prefix + "_rates.csv");
    out << "n,d,r,t,k,reps,beta_a_sq,beta_n_sq,proj_u_sq,proj_v_sq,kron_sq,"
           "beta_a_sq_smooth,beta_n_sq_smooth,proj_u_sq_smooth,"
           "proj_v_sq_smooth,kron_sq_smooth\n";
    auto smooth = [&](auto member, size_t i) {
      size_t lo = i > 0 ? i - 1 : 0;
      size_t hi = std::min(i + 1, result.rows.size() - 1);
      double sum = 0.0;
      for (size_t j = lo; j <= hi; ++j) sum += result.rows[j].*member;
      return sum / static_cast<double>(hi - lo + 1);
    };
    for (size_t i = 0; i < result.rows.size(); ++i) {
      const McRatesRow& r = result.rows[i];
      out << r.n << ',' << r.d << ',' << r.r << ',' << r.t << ',' << r.k << ','
          << r.reps << ',' << fmt_g17(r.beta_a_sq) << ','
          << fmt_g17(r.beta_n_sq) << ',' << fmt_g17(r.proj_u_sq) << ','
          << fmt_g17(r.proj_v_sq) << ',' << fmt_g17(r.kron_sq) << ','
          << fmt_g17(smooth(&McRatesRow::beta_a_sq, i)) << ','
          << fmt_g17(smooth(&McRatesRow::beta_n_sq, i)) << ','
          << fmt_g17(smooth(&McRatesRow::proj_u_sq, i)) << ','
          << fmt_g17(smooth(&McRatesRow::proj_v_sq, i)) << ','
          << fmt_g17(smooth(&McRatesRow::kron_sq, i)) << '\n';
      out.flush();
    }
    std::ofstream sl(cfg.output_prefix + "_slopes.csv");
    if (!sl) throw io_error("cannot open " + cfg.output_prefix + "_slopes.csv");
    sl << "metric,slope,intercept,r_squared\n";
    for (const auto& [name, s] : result.slopes)
      sl << name << ',' << fmt_g17(s.slope) << ',' << fmt_g17(s.intercept)
         << ',' << fmt_g17(s.r_squared) << '\n';
  }
  return result;
}

std::vector<BenchRow> run_bench(const PanelSeries& panel,
                                const WeightMatrix& w,
                                const BenchOptions& opts) {
  const Index total = panel.total();
  const Index n_train = static_cast<Index>(
      std::floor(opts.train_frac * static_cast<double>(total)));
  if (n_train < 2 || n_train >= total)
    throw input_error("bench: train window too small or test window empty");

  FitConfig fit = opts.fit;
  if (fit.auto_ranks) {
    PanelSeries train;
    train.nodes = panel.nodes;
    train.vars = panel.vars;
    train.data.assign(panel.data.begin(), panel.data.begin() + n_train);
    Rng rng(fit.seed);
    fit.ranks =
        select_rank(train, w, fit.resolved_r_bar(panel.vars), fit, rng);
    fit.auto_ranks = false;
  }
  Index rrvar_rank = opts.rrvar_rank;
  if (rrvar_rank <= 0)
    rrvar_rank =
        std::min<Index>(panel.nodes * fit.ranks.at(0), panel.nodes * panel.vars);

  std::vector<BenchRow> rows;
  rows.push_back({"rrnar", rolling_eval(make_rrnar_fitter(w, fit), panel,
                                        opts.train_frac, opts.refit_every)});
  rows.push_back({"nar", rolling_eval(make_nar_fitter(w), panel,
                                      opts.train_frac, opts.refit_every)});
  rows.push_back({"rrvar", rolling_eval(make_rrvar_fitter(rrvar_rank), panel,
                                        opts.train_frac, opts.refit_every)});
  rows.push_back({"mar", rolling_eval(make_mar_fitter(opts.mar_iters), panel,
                                      opts.train_frac, opts.refit_every)});
  return rows;
}

}  // namespace rrnar
