#include "rrnar/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace rrnar {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

long parse_long(const std::string& s, const std::string& where) {
  try {
    size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw io_error(where + ": expected an integer, got '" + s + "'");
  }
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw io_error(where + ": expected a number, got '" + s + "'");
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open for reading: " + path);
  return in;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw io_error(where + ": expected an array of arrays");
  Index rows = static_cast<Index>(j.size());
  Index cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (static_cast<Index>(j[i].size()) != cols)
      throw io_error(where + ": ragged rows");
    for (Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

}  // namespace

std::string fmt_g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_panel_csv(const std::string& path, const PanelSeries& panel) {
  std::ofstream out = open_out(path);
  out << "t,node,variable,value\n";
  for (Index t = 0; t < panel.total(); ++t)
    for (Index i = 0; i < panel.nodes; ++i)
      for (Index j = 0; j < panel.vars; ++j)
        out << t << ',' << i << ',' << j << ','
            << fmt_g17(panel.data[t](i, j)) << '\n';
}

PanelSeries read_panel_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) !=
          std::vector<std::string>{"t", "node", "variable", "value"})
    throw io_error(path + ": expected header 't,node,variable,value'");

  struct Row {
    long t, node, var;
    double value;
  };
  std::vector<Row> rows;
  long max_t = -1, max_node = -1, max_var = -1;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    std::string where = path + ":" + std::to_string(lineno);
    if (fields.size() != 4) throw io_error(where + ": expected 4 fields");
    Row r{parse_long(fields[0], where), parse_long(fields[1], where),
          parse_long(fields[2], where), parse_double(fields[3], where)};
    if (r.t < 0 || r.node < 0 || r.var < 0)
      throw io_error(where + ": negative index");
    max_t = std::max(max_t, r.t);
    max_node = std::max(max_node, r.node);
    max_var = std::max(max_var, r.var);
    rows.push_back(r);
  }
  if (rows.empty()) throw io_error(path + ": no data rows");

  PanelSeries panel;
  panel.nodes = max_node + 1;
  panel.vars = max_var + 1;
  panel.data.assign(max_t + 1, Matrix::Zero(panel.nodes, panel.vars));
  std::vector<char> seen(rows.size() ? (max_t + 1) * panel.nodes * panel.vars : 0, 0);
  for (const Row& r : rows) {
    panel.data[r.t](r.node, r.var) = r.value;
    seen[(r.t * panel.nodes + r.node) * panel.vars + r.var] = 1;
  }
  for (char s : seen)
    if (!s) throw io_error(path + ": panel has missing (t,node,variable) cells");
  return panel;
}

void write_adjacency_csv(const std::string& path, const AdjacencyMatrix& adj) {
  std::ofstream out = open_out(path);
  out << "src,dst\n";
  for (Index i = 0; i < adj.nodes(); ++i)
    for (Index j = 0; j < adj.nodes(); ++j)
      if (adj.entries(i, j) != 0.0) out << i << ',' << j << '\n';
}

AdjacencyMatrix read_adjacency_csv(const std::string& path, Index nodes) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) ||
      split_csv_line(line) != std::vector<std::string>{"src", "dst"})
    throw io_error(path + ": expected header 'src,dst'");
  std::vector<std::pair<long, long>> edges;
  long max_id = -1;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    std::string where = path + ":" + std::to_string(lineno);
    if (fields.size() != 2) throw io_error(where + ": expected 2 fields");
    long s = parse_long(fields[0], where), d = parse_long(fields[1], where);
    if (s < 0 || d < 0) throw io_error(where + ": negative node id");
    if (s == d) throw io_error(where + ": self-loop edge");
    max_id = std::max({max_id, s, d});
    edges.emplace_back(s, d);
  }
  Index n = nodes > 0 ? nodes : max_id + 1;
  if (max_id >= n) throw io_error(path + ": edge id exceeds node count");
  if (n < 1) throw io_error(path + ": no edges and no node count given");
  Matrix a = Matrix::Zero(n, n);
  for (auto [s, d] : edges) a(s, d) = 1.0;
  return AdjacencyMatrix{std::move(a)};
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out = open_out(path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << fmt_g17(m(i, j));
    }
    out << '\n';
  }
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    std::vector<double> row;
    for (const std::string& f : fields)
      row.push_back(parse_double(f, path + ":" + std::to_string(lineno)));
    if (!rows.empty() && row.size() != rows[0].size())
      throw io_error(path + ": ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw io_error(path + ": empty matrix file");
  Matrix m(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[0].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

nlohmann::json params_to_json(const ParamSet& params) {
  nlohmann::json j;
  j["n"] = params.nodes;
  j["d"] = params.vars;
  nlohmann::json betas = nlohmann::json::array();
  nlohmann::json us = nlohmann::json::array();
  nlohmann::json vs = nlohmann::json::array();
  nlohmann::json ranks = nlohmann::json::array();
  for (const LagParams& lag : params.lags) {
    betas.push_back({lag.beta_a, lag.beta_n});
    us.push_back(matrix_to_json(lag.u));
    vs.push_back(matrix_to_json(lag.v));
    ranks.push_back(lag.rank());
  }
  j["betas"] = std::move(betas);
  j["u"] = std::move(us);
  j["v"] = std::move(vs);
  j["ranks"] = std::move(ranks);
  return j;
}

ParamSet params_from_json(const nlohmann::json& j) {
  ParamSet params;
  try {
    params.nodes = j.at("n").get<Index>();
    params.vars = j.at("d").get<Index>();
    const auto& betas = j.at("betas");
    const auto& us = j.at("u");
    const auto& vs = j.at("v");
    if (betas.size() != us.size() || us.size() != vs.size())
      throw io_error("params: betas/u/v lengths disagree");
    for (size_t ell = 0; ell < betas.size(); ++ell) {
      LagParams lag;
      lag.beta_a = betas[ell].at(0).get<double>();
      lag.beta_n = betas[ell].at(1).get<double>();
      lag.u = matrix_from_json(us[ell], "params.u");
      lag.v = matrix_from_json(vs[ell], "params.v");
      if (lag.u.rows() != params.vars || lag.v.rows() != params.vars ||
          lag.u.cols() != lag.v.cols())
        throw io_error("params: factor shapes inconsistent with d");
      params.lags.push_back(std::move(lag));
    }
  } catch (const nlohmann::json::exception& e) {
    throw io_error(std::string("params document: ") + e.what());
  }
  if (params.lags.empty()) throw io_error("params document: no lags");
  return params;
}

nlohmann::json fit_result_to_json(const FitResult& fit, const FitConfig& cfg) {
  nlohmann::json j = params_to_json(fit.params);
  j["ranks"] = fit.selected_ranks;
  j["loss_trace"] = fit.loss_trace;
  j["iters"] = fit.iters;
  j["converged"] = fit.converged;
  j["seed"] = cfg.seed;
  j["config"] = {{"eta", cfg.eta},
                 {"max_iter", cfg.max_iter},
                 {"rel_tol", cfg.rel_tol},
                 {"als_sweeps", cfg.als_sweeps},
                 {"lag", cfg.lag},
                 {"r_bar", cfg.r_bar},
                 {"ridge_factor", cfg.ridge_factor},
                 {"gram_cond_limit", cfg.gram_cond_limit},
                 {"sequential_updates", cfg.sequential_updates},
                 {"rank_select_als_only", cfg.rank_select_als_only}};
  j["init"] = params_to_json(fit.init_params);
  return j;
}

nlohmann::json true_model_to_json(const TrueModel& model, std::uint64_t seed) {
  nlohmann::json j = params_to_json(model.params);
  j["rho"] = model.rho;
  j["w_frob_sq"] = model.weight.frob_sq;
  j["seed"] = seed;
  return j;
}

nlohmann::json forecast_report_to_json(const ForecastReport& report) {
  return {{"per_variable_mse", report.per_variable_mse},
          {"global_mse", report.global_mse},
          {"median_se", report.median_se},
          {"horizon", report.horizon},
          {"n_forecasts", report.n_forecasts}};
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in = open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw io_error(path + ": " + e.what());
  }
}

}  // namespace rrnar
