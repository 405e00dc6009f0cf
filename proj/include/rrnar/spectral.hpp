#ifndef RRNAR_SPECTRAL_HPP
#define RRNAR_SPECTRAL_HPP

#include "rrnar/types.hpp"

namespace rrnar {

/// Largest eigenvalue modulus. Dense Schur path for order <= 2000,
/// power iteration beyond.
double spectral_radius(const Matrix& a);

}  // namespace rrnar

#endif
