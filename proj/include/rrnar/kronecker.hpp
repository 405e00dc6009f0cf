#ifndef RRNAR_KRONECKER_HPP
#define RRNAR_KRONECKER_HPP

#include "rrnar/types.hpp"

namespace rrnar {

/// Kronecker product M (p x q) with K (m x n) -> pm x qn.
template <typename DerivedM, typename DerivedK>
Matrix kron(const Eigen::MatrixBase<DerivedM>& m,
            const Eigen::MatrixBase<DerivedK>& k) {
  Matrix out(m.rows() * k.rows(), m.cols() * k.cols());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      out.block(i * k.rows(), j * k.cols(), k.rows(), k.cols()) =
          m(i, j) * k.derived();
  return out;
}

/// Entry re-arrangement sending M (D x D) kron K (N x N) to
/// vec(M) vec(K)^T, applied to an arbitrary ND x ND matrix. vec stacks
/// columns. The map is a bijective entry permutation, hence a Frobenius
/// isometry.
template <typename Derived>
Matrix rearrange_P(const Eigen::MatrixBase<Derived>& a, Index n, Index d) {
  if (a.rows() != n * d || a.cols() != n * d)
    throw shape_error("rearrange_P: input must be ND x ND for dims (N, D)");
  Matrix out(d * d, n * n);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i)
      for (Index l = 0; l < n; ++l)
        for (Index k = 0; k < n; ++k)
          out(j * d + i, l * n + k) = a(i * n + k, j * n + l);
  return out;
}

/// Inverse permutation: rearrange_P_inv(rearrange_P(A)) == A exactly.
template <typename Derived>
Matrix rearrange_P_inv(const Eigen::MatrixBase<Derived>& b, Index n, Index d) {
  if (b.rows() != d * d || b.cols() != n * n)
    throw shape_error("rearrange_P_inv: input must be D^2 x N^2 for (N, D)");
  Matrix out(n * d, n * d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i)
      for (Index l = 0; l < n; ++l)
        for (Index k = 0; k < n; ++k)
          out(i * n + k, j * n + l) = b(j * d + i, l * n + k);
  return out;
}

/// vec(A): stack columns.
template <typename Derived>
Vector vec(const Eigen::MatrixBase<Derived>& a) {
  return Eigen::Map<const Vector>(a.derived().eval().data(), a.size());
}

/// mat: inverse of vec for the given shape.
inline Matrix unvec(const Vector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) throw shape_error("unvec: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

}  // namespace rrnar

#endif
