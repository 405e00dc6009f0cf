#include "rrnar/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace rrnar {

namespace {

// Power iteration on the squared map to keep complex leading pairs stable;
// tracks the growth rate of the iterate norm.
double power_iteration_radius(const Matrix& a) {
  const Index n = a.rows();
  Vector x = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  double estimate = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vector y = a * (a * x);
    double norm = y.norm();
    if (norm == 0.0) return 0.0;
    double next = std::sqrt(norm);
    y /= norm;
    if (it > 2 && std::abs(next - estimate) <= 1e-10 * std::max(next, 1.0)) {
      return next;
    }
    estimate = next;
    x = y;
  }
  return estimate;
}

}  // namespace

double spectral_radius(const Matrix& a) {
  if (a.rows() != a.cols())
    throw shape_error("spectral_radius: matrix must be square");
  if (a.size() == 0) return 0.0;
  if (a.rows() > 2000) return power_iteration_radius(a);
  // .eigenvalues() runs a real Schur decomposition, no eigenvectors formed.
  return a.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace rrnar
