#ifndef RRNAR_DGP_HPP
#define RRNAR_DGP_HPP

#include <utility>

#include "rrnar/rng.hpp"
#include "rrnar/types.hpp"

namespace rrnar {

/// Innovation scale. Default is vec(E_t) ~ N(0, I); entry_sd, when set to an
/// N x D matrix, gives a diagonal covariance with per-entry standard
/// deviations. scale multiplies either.
struct NoiseSpec {
  double scale = 1.0;
  Matrix entry_sd;  // empty => identity

  bool has_entry_sd() const { return entry_sd.size() > 0; }
};

struct DgpConfig {
  ModelDims dims;
  Index t = 0;          // effective sample length
  Index burn_in = 100;  // discarded warm-up steps
  Index k = 3;          // degree of the k-regular cycle topology
  double singular_low = 0.5;
  double singular_high = 1.5;
  NoiseSpec noise;
  double init_scale = 0.0;  // sd of the pre-sample states; 0 => zeros
  std::uint64_t seed = 0;
  bool exact_companion_check = false;  // exact stationarity check on rejection

  void validate() const;
};

struct TrueModel {
  ParamSet params;
  WeightMatrix weight;
  double rho = 0.0;  // spectral radius of the transition
};

/// Draw scalar pairs from U(0,1) and variable operators Q1 * Lambda * Q2^T
/// with Haar frames and Lambda ~ U[low, high], rejecting the whole tuple
/// until the stationarity guard passes.
TrueModel sample_params(const DgpConfig& config, Rng& rng);

/// Run the recursion for burn_in + T + L steps from the configured initial
/// states, discard the burn-in, keep L warm observations plus T effective.
PanelSeries simulate(const TrueModel& model, const DgpConfig& config, Rng& rng);

/// Sufficient stationarity check: for L = 1 the product
/// rho(B_var) * rho(B_net) < 1, for L > 1 the sum of per-lag products < 1.
/// Returns the flag and the checked value.
std::pair<bool, double> check_stationary(const ParamSet& params,
                                         const WeightMatrix& w);

/// Spectral radius of the exact lag-L companion matrix (the transition of
/// the stacked VAR(1) representation).
double companion_radius(const ParamSet& params, const WeightMatrix& w);

}  // namespace rrnar

#endif
