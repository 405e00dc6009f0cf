#ifndef RRNAR_IO_HPP
#define RRNAR_IO_HPP

#include <string>

#include "rrnar/dgp.hpp"
#include "rrnar/estimator.hpp"
#include "rrnar/eval.hpp"
#include "rrnar/types.hpp"

#include "json.hpp"

namespace rrnar {

/// %.17g rendering: shortest text that round-trips a double exactly.
std::string fmt_g17(double value);

// Panel long CSV: header `t,node,variable,value`, 0-based indices.
void write_panel_csv(const std::string& path, const PanelSeries& panel);
PanelSeries read_panel_csv(const std::string& path);

// Adjacency edge-list CSV: header `src,dst`, one directed edge per row.
// nodes = 0 infers the count from the largest id seen.
void write_adjacency_csv(const std::string& path, const AdjacencyMatrix& adj);
AdjacencyMatrix read_adjacency_csv(const std::string& path, Index nodes = 0);

// Dense matrix CSV: comma-separated rows, no header.
void write_matrix_csv(const std::string& path, const Matrix& m);
Matrix read_matrix_csv(const std::string& path);

nlohmann::json params_to_json(const ParamSet& params);
ParamSet params_from_json(const nlohmann::json& j);

nlohmann::json fit_result_to_json(const FitResult& fit, const FitConfig& cfg);
nlohmann::json true_model_to_json(const TrueModel& model, std::uint64_t seed);
nlohmann::json forecast_report_to_json(const ForecastReport& report);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

}  // namespace rrnar

#endif
