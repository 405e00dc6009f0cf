#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rrnar/dgp.hpp"
#include "rrnar/experiments.hpp"
#include "rrnar/graph.hpp"
#include "rrnar/io.hpp"

namespace {

using nlohmann::json;
using namespace rrnar;

// Exit codes: 0 success, 2 input error, 3 non-convergence, 4 numerical
// failure.
constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNoConverge = 3;
constexpr int kExitNumerical = 4;

std::uint64_t env_seed() {
  const char* s = std::getenv("RRNAR_SEED");
  return s ? std::strtoull(s, nullptr, 10) : 0;
}

int env_thread_cap() {
  const char* s = std::getenv("RRNAR_THREADS");
  return s ? std::atoi(s) : 0;
}

int resolve_threads(int requested) {
  int cap = env_thread_cap();
  if (requested < 1) requested = 1;
  if (cap > 0 && requested > cap) requested = cap;
  return requested;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  json j = read_json(path);
  if (!j.is_object()) throw io_error(path + ": config must be a JSON object");
  return j;
}

// Flag > config file > default. CLI11 already applied the flag when present.
template <typename T>
void merge(const CLI::App* cmd, const std::string& flag, const json& cfg,
           const std::string& key, T& value) {
  if (cmd->count(flag) > 0) return;
  if (!cfg.contains(key)) return;
  try {
    value = cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw io_error("config field '" + key + "': " + e.what());
  }
}

std::vector<Index> parse_index_list(const std::string& text,
                                    const std::string& what) {
  std::vector<Index> out;
  std::string cur;
  for (char c : text + ",") {
    if (c == ',') {
      if (cur.empty()) continue;
      try {
        out.push_back(std::stol(cur));
      } catch (const std::exception&) {
        throw input_error(what + ": expected comma-separated integers, got '" +
                          text + "'");
      }
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (out.empty()) throw input_error(what + ": empty list");
  return out;
}

struct FitFlags {
  double eta = 0.25;
  Index max_iter = 2000;
  double rel_tol = 1e-10;
  Index als_sweeps = 1;
  Index lag = 1;
  std::string ranks = "auto";
  Index r_bar = 0;
  double ridge_factor = 0.5;
  std::uint64_t seed = env_seed();

  void add_options(CLI::App* cmd) {
    cmd->add_option("--eta", eta, "step size");
    cmd->add_option("--max-iter", max_iter, "iteration cap");
    cmd->add_option("--rel-tol", rel_tol, "relative loss-change stop");
    cmd->add_option("--als-sweeps", als_sweeps, "warm-start sweeps");
    cmd->add_option("--lag", lag, "lag order L");
    cmd->add_option("--ranks", ranks, "comma list of ranks, or 'auto'");
    cmd->add_option("--r-bar", r_bar, "rank search cap (0 = min(D/2,10))");
    cmd->add_option("--ridge-factor", ridge_factor,
                    "rank-selection ridge constant");
    cmd->add_option("--seed", seed, "rng seed");
  }

  void merge_config(const CLI::App* cmd, const json& cfg) {
    merge(cmd, "--eta", cfg, "eta", eta);
    merge(cmd, "--max-iter", cfg, "max_iter", max_iter);
    merge(cmd, "--rel-tol", cfg, "rel_tol", rel_tol);
    merge(cmd, "--als-sweeps", cfg, "als_sweeps", als_sweeps);
    merge(cmd, "--lag", cfg, "lag", lag);
    merge(cmd, "--ranks", cfg, "ranks", ranks);
    merge(cmd, "--r-bar", cfg, "r_bar", r_bar);
    merge(cmd, "--ridge-factor", cfg, "ridge_factor", ridge_factor);
    merge(cmd, "--seed", cfg, "seed", seed);
  }

  FitConfig to_config() const {
    FitConfig fit;
    fit.eta = eta;
    fit.max_iter = max_iter;
    fit.rel_tol = rel_tol;
    fit.als_sweeps = als_sweeps;
    fit.lag = lag;
    fit.r_bar = r_bar;
    fit.ridge_factor = ridge_factor;
    fit.seed = seed;
    if (ranks == "auto") {
      fit.auto_ranks = true;
    } else {
      fit.ranks = parse_index_list(ranks, "--ranks");
      if (static_cast<Index>(fit.ranks.size()) != fit.lag)
        throw input_error("--ranks: need one rank per lag");
    }
    return fit;
  }
};

WeightMatrix load_weight(const std::string& adj_path, Index nodes) {
  return row_normalize(read_adjacency_csv(adj_path, nodes));
}

int cmd_simulate(const CLI::App* cmd, const json& cfg, Index n, Index d,
                 std::string ranks, Index lag, Index t, Index k, Index burn_in,
                 double noise_scale, std::uint64_t seed, std::string out_dir) {
  (void)cmd;
  (void)cfg;
  DgpConfig dgp;
  dgp.dims.nodes = n;
  dgp.dims.vars = d;
  dgp.dims.lag = lag;
  dgp.dims.ranks = parse_index_list(ranks, "--r");
  dgp.t = t;
  dgp.burn_in = burn_in;
  dgp.k = k;
  dgp.noise.scale = noise_scale;
  dgp.seed = seed;
  dgp.validate();

  std::filesystem::create_directories(out_dir);
  Rng rng(seed);
  TrueModel model = sample_params(dgp, rng);
  PanelSeries panel = simulate(model, dgp, rng);

  write_panel_csv(out_dir + "/panel.csv", panel);
  AdjacencyMatrix adj = build_k_regular_cycle(n, k);
  write_adjacency_csv(out_dir + "/adjacency.csv", adj);
  write_json(out_dir + "/truth.json", true_model_to_json(model, seed));
  std::cout << "rho=" << fmt_g17(model.rho)
            << " w_frob_sq=" << fmt_g17(model.weight.frob_sq) << "\n";
  return kExitOk;
}

int cmd_fit(const FitFlags& flags, const std::string& panel_path,
            const std::string& adj_path, Index nodes,
            const std::string& out_path) {
  PanelSeries panel = read_panel_csv(panel_path);
  WeightMatrix w = load_weight(adj_path, nodes > 0 ? nodes : panel.nodes);
  FitConfig fit = flags.to_config();
  Rng rng(fit.seed);
  FitResult result = fit_rrnar(panel, w, fit, rng);
  if (!out_path.empty())
    write_json(out_path, fit_result_to_json(result, fit));
  std::cout << "converged=" << (result.converged ? "yes" : "no")
            << " iters=" << result.iters
            << " loss=" << fmt_g17(result.loss_trace.back()) << " ranks=";
  for (size_t i = 0; i < result.selected_ranks.size(); ++i)
    std::cout << (i ? "," : "") << result.selected_ranks[i];
  std::cout << "\n";
  return result.converged ? kExitOk : kExitNoConverge;
}

int cmd_rank(const FitFlags& flags, const std::string& panel_path,
             const std::string& adj_path, Index nodes) {
  PanelSeries panel = read_panel_csv(panel_path);
  WeightMatrix w = load_weight(adj_path, nodes > 0 ? nodes : panel.nodes);
  FitConfig fit = flags.to_config();
  Rng rng(fit.seed);
  std::vector<Index> ranks =
      select_rank(panel, w, fit.resolved_r_bar(panel.vars), fit, rng);
  for (size_t i = 0; i < ranks.size(); ++i)
    std::cout << (i ? "," : "") << ranks[i];
  std::cout << "\n";
  return kExitOk;
}

int cmd_forecast(const std::string& panel_path, const std::string& adj_path,
                 Index nodes, const std::string& params_path,
                 double train_frac, Index refit_every,
                 const std::string& out_path, const std::string& csv_path) {
  PanelSeries panel = read_panel_csv(panel_path);
  WeightMatrix w = load_weight(adj_path, nodes > 0 ? nodes : panel.nodes);
  ParamSet params = params_from_json(read_json(params_path));
  Fitter fixed = [params, w](const PanelSeries&) {
    return Forecaster{params.lag_order(),
                      [params, w](const std::vector<Matrix>& h) {
                        return forecast(params, w, h);
                      }};
  };
  ForecastReport report = rolling_eval(fixed, panel, train_frac, refit_every);
  if (!out_path.empty()) write_json(out_path, forecast_report_to_json(report));
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw io_error("cannot open " + csv_path);
    out << "variable,mse\n";
    for (size_t j = 0; j < report.per_variable_mse.size(); ++j)
      out << j << ',' << fmt_g17(report.per_variable_mse[j]) << '\n';
    out << "global," << fmt_g17(report.global_mse) << '\n';
    out << "median," << fmt_g17(report.median_se) << '\n';
  }
  std::cout << "global_mse=" << fmt_g17(report.global_mse)
            << " median_se=" << fmt_g17(report.median_se)
            << " n_forecasts=" << report.n_forecasts << "\n";
  return kExitOk;
}

int cmd_bench(const FitFlags& flags, const std::string& panel_path,
              const std::string& adj_path, Index nodes, double train_frac,
              Index refit_every, Index rrvar_rank, Index mar_iters,
              const std::string& out_path) {
  PanelSeries panel = read_panel_csv(panel_path);
  WeightMatrix w = load_weight(adj_path, nodes > 0 ? nodes : panel.nodes);
  BenchOptions opts;
  opts.train_frac = train_frac;
  opts.refit_every = refit_every;
  opts.fit = flags.to_config();
  opts.rrvar_rank = rrvar_rank;
  opts.mar_iters = mar_iters;
  std::vector<BenchRow> rows = run_bench(panel, w, opts);

  std::ofstream out;
  if (!out_path.empty()) {
    out.open(out_path);
    if (!out) throw io_error("cannot open " + out_path);
    out << "model,variable,mse\n";
  }
  for (const BenchRow& row : rows) {
    for (size_t j = 0; j < row.report.per_variable_mse.size(); ++j) {
      if (out.is_open())
        out << row.model << ',' << j << ','
            << fmt_g17(row.report.per_variable_mse[j]) << '\n';
    }
    if (out.is_open()) {
      out << row.model << ",global," << fmt_g17(row.report.global_mse) << '\n';
      out << row.model << ",median," << fmt_g17(row.report.median_se) << '\n';
    }
    std::cout << row.model << ": global_mse=" << fmt_g17(row.report.global_mse)
              << " median_se=" << fmt_g17(row.report.median_se) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced-rank network autoregression toolkit"};
  app.require_subcommand(1);

  std::string config_path;

  // ---- simulate ----
  auto* sim = app.add_subcommand("simulate", "draw a model and a panel");
  Index sim_n = 20, sim_d = 10, sim_lag = 1, sim_t = 200, sim_k = 3,
        sim_burn = 100;
  std::string sim_r = "2", sim_out = ".";
  double sim_noise = 1.0;
  std::uint64_t sim_seed = env_seed();
  sim->add_option("--config", config_path, "JSON config file");
  sim->add_option("--n", sim_n, "nodes");
  sim->add_option("--d", sim_d, "variables");
  sim->add_option("--r", sim_r, "true rank(s), comma list per lag");
  sim->add_option("--lag", sim_lag, "lag order");
  sim->add_option("--t", sim_t, "effective sample length");
  sim->add_option("--k", sim_k, "regular-graph degree");
  sim->add_option("--burn-in", sim_burn, "burn-in steps");
  sim->add_option("--noise-scale", sim_noise, "innovation scale");
  sim->add_option("--seed", sim_seed, "rng seed");
  sim->add_option("--out", sim_out, "output directory");

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "estimate a model from files");
  FitFlags fit_flags;
  std::string fit_panel, fit_adj, fit_out = "fit.json";
  Index fit_nodes = 0;
  fit->add_option("--config", config_path, "JSON config file");
  fit->add_option("--panel", fit_panel, "panel CSV")->required();
  fit->add_option("--adj", fit_adj, "adjacency edge-list CSV")->required();
  fit->add_option("--nodes", fit_nodes, "node count override");
  fit->add_option("--out", fit_out, "output document");
  fit_flags.add_options(fit);

  // ---- rank ----
  auto* rank = app.add_subcommand("rank", "select ranks only");
  FitFlags rank_flags;
  std::string rank_panel, rank_adj;
  Index rank_nodes = 0;
  rank->add_option("--config", config_path, "JSON config file");
  rank->add_option("--panel", rank_panel, "panel CSV")->required();
  rank->add_option("--adj", rank_adj, "adjacency edge-list CSV")->required();
  rank->add_option("--nodes", rank_nodes, "node count override");
  rank_flags.add_options(rank);

  // ---- forecast ----
  auto* fc = app.add_subcommand("forecast", "rolling one-step evaluation of "
                                            "a fixed parameter document");
  std::string fc_panel, fc_adj, fc_params, fc_out = "forecast.json", fc_csv;
  Index fc_nodes = 0, fc_refit = 0;
  double fc_frac = 0.8;
  fc->add_option("--config", config_path, "JSON config file");
  fc->add_option("--panel", fc_panel, "panel CSV")->required();
  fc->add_option("--adj", fc_adj, "adjacency edge-list CSV")->required();
  fc->add_option("--nodes", fc_nodes, "node count override");
  fc->add_option("--params", fc_params, "fit/truth document")->required();
  fc->add_option("--train-frac", fc_frac, "chronological split");
  fc->add_option("--refit-every", fc_refit, "unused for fixed params");
  fc->add_option("--out", fc_out, "report JSON");
  fc->add_option("--csv", fc_csv, "report CSV");

  // ---- mc-rank ----
  auto* mcr = app.add_subcommand("mc-rank", "rank-selection frequency table");
  FitFlags mcr_flags;
  std::string mcr_n = "20,50,100", mcr_d = "10,20,50", mcr_r = "2,3",
              mcr_t = "100,200,400", mcr_out = "mc_rank.csv";
  Index mcr_reps = 100, mcr_k = 3;
  int mcr_par = 1;
  mcr->add_option("--config", config_path, "JSON config file");
  mcr->add_option("--n-list", mcr_n, "node counts");
  mcr->add_option("--d-list", mcr_d, "variable counts");
  mcr->add_option("--r-list", mcr_r, "true ranks");
  mcr->add_option("--t-list", mcr_t, "sample lengths");
  mcr->add_option("--reps", mcr_reps, "replications per cell");
  mcr->add_option("--k", mcr_k, "graph degree");
  mcr->add_option("--parallelism", mcr_par, "worker count");
  mcr->add_option("--out", mcr_out, "output CSV");
  mcr_flags.add_options(mcr);

  // ---- mc-rates ----
  auto* mcs = app.add_subcommand("mc-rates", "error-rate slope experiment");
  FitFlags mcs_flags;
  std::string mcs_kind = "vary_n", mcs_topology = "sparse", mcs_grid,
              mcs_out = "mc";
  Index mcs_n = 0, mcs_d = 0, mcs_rr = 0, mcs_t = 0, mcs_reps = 50;
  double mcs_ba = 0.3, mcs_bn = 0.3;
  int mcs_par = 1;
  mcs->add_option("--config", config_path, "JSON config file");
  mcs->add_option("--kind", mcs_kind, "vary_n | vary_d | vary_t");
  mcs->add_option("--topology", mcs_topology, "sparse | dense");
  mcs->add_option("--grid", mcs_grid, "comma list for the varying dimension");
  mcs->add_option("--n", mcs_n, "fixed N (when not varying)");
  mcs->add_option("--d", mcs_d, "fixed D");
  mcs->add_option("--r", mcs_rr, "true rank");
  mcs->add_option("--t", mcs_t, "fixed T");
  mcs->add_option("--beta-a", mcs_ba, "true autoregressive scalar");
  mcs->add_option("--beta-n", mcs_bn, "true spillover scalar");
  mcs->add_option("--reps", mcs_reps, "replications per cell");
  mcs->add_option("--parallelism", mcs_par, "worker count");
  mcs->add_option("--out-prefix", mcs_out, "output file prefix");
  mcs_flags.add_options(mcs);

  // ---- bench ----
  auto* bench = app.add_subcommand("bench", "model comparison on a panel");
  FitFlags bench_flags;
  std::string bench_panel, bench_adj, bench_out = "bench.csv";
  Index bench_nodes = 0, bench_refit = 0, bench_rrvar = 0, bench_mar = 20;
  double bench_frac = 0.8;
  bench->add_option("--config", config_path, "JSON config file");
  bench->add_option("--panel", bench_panel, "panel CSV")->required();
  bench->add_option("--adj", bench_adj, "adjacency CSV")->required();
  bench->add_option("--nodes", bench_nodes, "node count override");
  bench->add_option("--train-frac", bench_frac, "chronological split");
  bench->add_option("--refit-every", bench_refit, "refit cadence, 0 = once");
  bench->add_option("--rrvar-rank", bench_rrvar, "baseline RRVAR rank");
  bench->add_option("--mar-iters", bench_mar, "MAR ALS sweeps");
  bench->add_option("--out", bench_out, "output CSV");
  bench_flags.add_options(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    json cfg = load_config(config_path);

    if (sim->parsed()) {
      merge(sim, "--n", cfg, "n", sim_n);
      merge(sim, "--d", cfg, "d", sim_d);
      merge(sim, "--r", cfg, "r", sim_r);
      merge(sim, "--lag", cfg, "lag", sim_lag);
      merge(sim, "--t", cfg, "t", sim_t);
      merge(sim, "--k", cfg, "k", sim_k);
      merge(sim, "--burn-in", cfg, "burn_in", sim_burn);
      merge(sim, "--noise-scale", cfg, "noise_scale", sim_noise);
      merge(sim, "--seed", cfg, "seed", sim_seed);
      merge(sim, "--out", cfg, "out", sim_out);
      return cmd_simulate(sim, cfg, sim_n, sim_d, sim_r, sim_lag, sim_t, sim_k,
                          sim_burn, sim_noise, sim_seed, sim_out);
    }
    if (fit->parsed()) {
      fit_flags.merge_config(fit, cfg);
      return cmd_fit(fit_flags, fit_panel, fit_adj, fit_nodes, fit_out);
    }
    if (rank->parsed()) {
      rank_flags.merge_config(rank, cfg);
      return cmd_rank(rank_flags, rank_panel, rank_adj, rank_nodes);
    }
    if (fc->parsed()) {
      merge(fc, "--train-frac", cfg, "train_frac", fc_frac);
      return cmd_forecast(fc_panel, fc_adj, fc_nodes, fc_params, fc_frac,
                          fc_refit, fc_out, fc_csv);
    }
    if (mcr->parsed()) {
      mcr_flags.merge_config(mcr, cfg);
      merge(mcr, "--n-list", cfg, "n_list", mcr_n);
      merge(mcr, "--d-list", cfg, "d_list", mcr_d);
      merge(mcr, "--r-list", cfg, "r_list", mcr_r);
      merge(mcr, "--t-list", cfg, "t_list", mcr_t);
      merge(mcr, "--reps", cfg, "reps", mcr_reps);
      merge(mcr, "--k", cfg, "k", mcr_k);
      merge(mcr, "--parallelism", cfg, "parallelism", mcr_par);
      merge(mcr, "--out", cfg, "out", mcr_out);
      McRankConfig mc;
      mc.n_list = parse_index_list(mcr_n, "--n-list");
      mc.d_list = parse_index_list(mcr_d, "--d-list");
      mc.r_list = parse_index_list(mcr_r, "--r-list");
      mc.t_list = parse_index_list(mcr_t, "--t-list");
      mc.reps = mcr_reps;
      mc.k = mcr_k;
      mc.seed = mcr_flags.seed;
      mc.parallelism = resolve_threads(mcr_par);
      mc.fit = mcr_flags.to_config();
      mc.r_bar = mcr_flags.r_bar;
      mc.output_csv = mcr_out;
      for (const McRankRow& row : run_mc_rank(mc))
        std::cout << "n=" << row.n << " d=" << row.d << " r=" << row.r
                  << " t=" << row.t << " frequency=" << fmt_g17(row.frequency)
                  << "\n";
      return kExitOk;
    }
    if (mcs->parsed()) {
      mcs_flags.merge_config(mcs, cfg);
      merge(mcs, "--kind", cfg, "kind", mcs_kind);
      merge(mcs, "--topology", cfg, "topology", mcs_topology);
      merge(mcs, "--grid", cfg, "grid", mcs_grid);
      merge(mcs, "--n", cfg, "n", mcs_n);
      merge(mcs, "--d", cfg, "d", mcs_d);
      merge(mcs, "--r", cfg, "r", mcs_rr);
      merge(mcs, "--t", cfg, "t", mcs_t);
      merge(mcs, "--beta-a", cfg, "beta_a", mcs_ba);
      merge(mcs, "--beta-n", cfg, "beta_n", mcs_bn);
      merge(mcs, "--reps", cfg, "reps", mcs_reps);
      merge(mcs, "--parallelism", cfg, "parallelism", mcs_par);
      merge(mcs, "--out-prefix", cfg, "out_prefix", mcs_out);
      McRatesConfig mc;
      if (mcs_kind == "vary_n")
        mc.kind = RatesKind::VaryN;
      else if (mcs_kind == "vary_d")
        mc.kind = RatesKind::VaryD;
      else if (mcs_kind == "vary_t")
        mc.kind = RatesKind::VaryT;
      else
        throw input_error("--kind must be vary_n, vary_d, or vary_t");
      if (mcs_topology == "dense")
        mc.dense = true;
      else if (mcs_topology != "sparse")
        throw input_error("--topology must be sparse or dense");
      if (!mcs_grid.empty()) mc.grid = parse_index_list(mcs_grid, "--grid");
      mc.n = mcs_n;
      mc.d = mcs_d;
      mc.r = mcs_rr;
      mc.t = mcs_t;
      mc.beta_a_true = mcs_ba;
      mc.beta_n_true = mcs_bn;
      mc.reps = mcs_reps;
      mc.seed = mcs_flags.seed;
      mc.parallelism = resolve_threads(mcs_par);
      mc.fit = mcs_flags.to_config();
      mc.output_prefix = mcs_out;
      McRatesResult result = run_mc_rates(mc);
      for (const auto& [name, s] : result.slopes)
        std::cout << name << ": slope=" << fmt_g17(s.slope)
                  << " r2=" << fmt_g17(s.r_squared) << "\n";
      return kExitOk;
    }
    if (bench->parsed()) {
      bench_flags.merge_config(bench, cfg);
      merge(bench, "--train-frac", cfg, "train_frac", bench_frac);
      merge(bench, "--refit-every", cfg, "refit_every", bench_refit);
      merge(bench, "--rrvar-rank", cfg, "rrvar_rank", bench_rrvar);
      merge(bench, "--mar-iters", cfg, "mar_iters", bench_mar);
      merge(bench, "--out", cfg, "out", bench_out);
      return cmd_bench(bench_flags, bench_panel, bench_adj, bench_nodes,
                       bench_frac, bench_refit, bench_rrvar, bench_mar,
                       bench_out);
    }
  } catch (const input_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
