#ifndef RRNAR_EXPERIMENTS_HPP
#define RRNAR_EXPERIMENTS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rrnar/baselines.hpp"
#include "rrnar/estimator.hpp"
#include "rrnar/eval.hpp"
#include "rrnar/types.hpp"

namespace rrnar {

/// Run fn(0..total-1) on a bounded worker pool. Task indices partition the
/// output, so results are identical for any worker count.
void parallel_for(Index total, int workers,
                  const std::function<void(Index)>& fn);

/// Least-squares line through (x, y) points plus the fit's R^2.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y);

struct McRankConfig {
  std::vector<Index> n_list, d_list, r_list, t_list;
  Index k = 3;
  Index burn_in = 100;
  Index reps = 100;
  Index r_bar = 0;  // 0 => min(D/2, 10)
  std::uint64_t seed = 0;
  int parallelism = 1;
  FitConfig fit;
  std::string output_csv;  // empty => no file
};

struct McRankRow {
  Index n, d, r, t, reps, correct;
  double frequency;
};

std::vector<McRankRow> run_mc_rank(const McRankConfig& cfg);

enum class RatesKind { VaryN, VaryD, VaryT };

struct McRatesConfig {
  RatesKind kind = RatesKind::VaryN;
  bool dense = false;           // sparse k=3 vs dense k=floor(N/2)
  std::vector<Index> grid;      // values of the varying dimension
  Index n = 0, d = 0, r = 0, t = 0;  // 0 => the §5-style default for the kind
  double beta_a_true = 0.3;
  double beta_n_true = 0.3;
  Index burn_in = 100;
  Index reps = 50;
  std::uint64_t seed = 0;
  int parallelism = 1;
  FitConfig fit;
  std::string output_prefix;  // empty => no files

  void apply_kind_defaults();
};

struct McRatesRow {
  Index n, d, r, t, k, reps;
  // Mean squared errors, rescaled by the balanced-truth nuisance scales.
  double beta_a_sq, beta_n_sq, proj_u_sq, proj_v_sq, kron_sq;
};

struct McRatesResult {
  std::vector<McRatesRow> rows;
  std::map<std::string, SlopeFit> slopes;  // keyed beta_a, beta_n, proj_u, proj_v, kron
};

McRatesResult run_mc_rates(const McRatesConfig& cfg);

struct BenchOptions {
  double train_frac = 0.8;
  Index refit_every = 0;  // 0 => single fit
  FitConfig fit;          // auto_ranks selects on the train window
  Index rrvar_rank = 0;   // 0 => min(N * selected rank, ND)
  Index mar_iters = 20;
};

struct BenchRow {
  std::string model;
  ForecastReport report;
};

std::vector<BenchRow> run_bench(const PanelSeries& panel,
                                const WeightMatrix& w,
                                const BenchOptions& opts);

}  // namespace rrnar

#endif
