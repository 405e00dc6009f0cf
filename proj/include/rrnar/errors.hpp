#ifndef RRNAR_ERRORS_HPP
#define RRNAR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rrnar {

// Bad user input: shapes, degrees, file contents, configs. CLI exit code 2.
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct shape_error : input_error {
  using input_error::input_error;
};

struct invalid_degree_error : input_error {
  using input_error::input_error;
};

struct insufficient_data_error : input_error {
  using input_error::input_error;
};

struct io_error : input_error {
  using input_error::input_error;
};

struct infeasible_config_error : input_error {
  using input_error::input_error;
};

// Numerical failure inside a solver. CLI exit code 4.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ill_conditioned_error : numerical_error {
  using numerical_error::numerical_error;
};

struct collinear_design_error : numerical_error {
  using numerical_error::numerical_error;
};

struct degenerate_factor_error : numerical_error {
  using numerical_error::numerical_error;
};

struct divergence_error : numerical_error {
  using numerical_error::numerical_error;
};

struct rank_mismatch_error : numerical_error {
  using numerical_error::numerical_error;
};

}  // namespace rrnar

#endif
