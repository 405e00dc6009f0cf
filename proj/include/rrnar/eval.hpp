#ifndef RRNAR_EVAL_HPP
#define RRNAR_EVAL_HPP

#include <functional>
#include <vector>

#include "rrnar/estimator.hpp"
#include "rrnar/types.hpp"

namespace rrnar {

/// Equivalence-aligned error decomposition between a fit and the truth.
/// dist_upper evaluates the invariant metric at the canonical alignment and
/// is an upper bound on its infimum; the per-lag pieces are computed after
/// both sides are norm-balanced.
struct AlignedError {
  double dist_upper = 0.0;
  double kron_err = 0.0;
  std::vector<double> beta_a_err;  // squared, per lag
  std::vector<double> beta_n_err;
  std::vector<double> proj_u_err;  // projector Frobenius distances
  std::vector<double> proj_v_err;
};

/// sqrt(sum_l |Bvar_l x Bnet_l - Bvar*_l x Bnet*_l|_F^2) via the 2x2 Gram
/// identity; the ND x ND products are never formed.
double kron_error(const ParamSet& fit, const ParamSet& truth,
                  const WeightMatrix& w);

AlignedError dist_upper(const ParamSet& fit, const ParamSet& truth,
                        const WeightMatrix& w);

/// Frobenius distance between the column-space orthogonal projectors.
double projector_dist(const Matrix& m1, const Matrix& m2);

/// One-step-ahead conditional mean. history.back() is the most recent
/// observation; at least L matrices required.
Matrix forecast(const ParamSet& params, const WeightMatrix& w,
                const std::vector<Matrix>& history);

struct ForecastReport {
  std::vector<double> per_variable_mse;  // original units
  double global_mse = 0.0;               // standardized units
  double median_se = 0.0;                // median standardized squared error
  Index horizon = 1;
  Index n_forecasts = 0;
};

/// A fitted one-step predictor: consumes the trailing `lag` observations.
struct Forecaster {
  Index lag = 1;
  std::function<Matrix(const std::vector<Matrix>&)> predict;
};

using Fitter = std::function<Forecaster(const PanelSeries&)>;

/// Chronological split at floor(train_frac * T); one-step-ahead forecasts
/// over the test region. refit_every <= 0 means a single fit on the train
/// window; otherwise the model is refit on the expanding window every
/// refit_every test steps. Standardization uses train-window statistics
/// only.
ForecastReport rolling_eval(const Fitter& fitter, const PanelSeries& panel,
                            double train_frac, Index refit_every = 0);

Fitter make_rrnar_fitter(const WeightMatrix& w, FitConfig cfg);

}  // namespace rrnar

#endif
