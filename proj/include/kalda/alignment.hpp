#pragma once

#include "kalda/common.hpp"
#include "kalda/dataset.hpp"
#include "kalda/scatter.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace kalda {

/// Kernel alignment A(K1, K2) = Tr(K1 K2) / (sqrt(Tr(K1 K1)) sqrt(Tr(K2 K2))).
///
/// Both kernels must be square, of equal size, symmetric and nonzero. The
/// value lies in [0, 1] for positive semi-definite inputs and is 1 exactly
/// when one kernel is a positive multiple of the other. Symmetric indefinite
/// kernels are accepted; the range guarantee does not apply to them.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar kernel_alignment(const Eigen::MatrixBase<DerivedA>& k1,
                                           const Eigen::MatrixBase<DerivedB>& k2) {
  using Scalar = typename DerivedA::Scalar;
  detail::require_dims(k1.rows() == k1.cols() && k2.rows() == k2.cols(),
                       "kernel_alignment: kernels must be square");
  detail::require_dims(k1.rows() == k2.rows(), "kernel_alignment: kernel size mismatch");
  const Scalar n1 = k1.norm();
  const Scalar n2 = k2.norm();
  if (n1 == Scalar(0) || n2 == Scalar(0))
    throw DegenerateProblem("kernel_alignment: zero kernel");
  if ((k1 - k1.transpose()).norm() > Scalar(1e-10) * n1 ||
      (k2 - k2.transpose()).norm() > Scalar(1e-10) * n2)
    throw DimensionError("kernel_alignment: kernels must be symmetric");
  // For symmetric K, sqrt(Tr(K K)) is the Frobenius norm.
  return trace_of_product(k1, k2) / (n1 * n2);
}

/// K1 = X^T X, K2 = Y Y^T.
template <typename Derived>
std::pair<Matrix<typename Derived::Scalar>, Matrix<typename Derived::Scalar>>
build_kernels_single(const Eigen::MatrixBase<Derived>& x,
                     const IndicatorSet<typename Derived::Scalar>& ind) {
  detail::require_dims(x.cols() == ind.samples(), "build_kernels_single: sample count mismatch");
  return {x.transpose() * x, ind.normalized * ind.normalized.transpose()};
}

/// K1 = Omega^{1/2} X^T X Omega^{1/2}, K2 = Omega^{-1/2} Yt Yt^T Omega^{-1/2}.
template <typename Derived>
std::pair<Matrix<typename Derived::Scalar>, Matrix<typename Derived::Scalar>>
build_kernels_multi(const Eigen::MatrixBase<Derived>& x,
                    const IndicatorSet<typename Derived::Scalar>& ind) {
  using Scalar = typename Derived::Scalar;
  detail::require_dims(x.cols() == ind.samples(), "build_kernels_multi: sample count mismatch");
  const Vector<Scalar> root = ind.weights.cwiseSqrt();
  const Vector<Scalar> inv_root = root.cwiseInverse();
  const Matrix<Scalar> gram = x.transpose() * x;
  const Matrix<Scalar> label = ind.normalized * ind.normalized.transpose();
  return {root.asDiagonal() * gram * root.asDiagonal(),
          inv_root.asDiagonal() * label * inv_root.asDiagonal()};
}

template <typename Derived>
std::pair<Matrix<typename Derived::Scalar>, Matrix<typename Derived::Scalar>> build_kernels(
    const Eigen::MatrixBase<Derived>& x, const IndicatorSet<typename Derived::Scalar>& ind) {
  return ind.mode == LabelMode::single ? build_kernels_single(x, ind)
                                       : build_kernels_multi(x, ind);
}

/// The constant c relating alignment to the scatter ratio.
///
/// Single mode: Y^T Y = I gives Tr((Y Y^T)^2) = K, so c = 1/sqrt(K).
/// Multi mode: Tr((Omega^-1 Yt Yt^T)^2) = ||Yt^T Omega^-1 Yt||_F^2, a K x K
/// quantity, so no n x n matrix is formed.
template <typename Scalar>
Scalar alignment_constant(const IndicatorSet<Scalar>& ind) {
  if (ind.mode == LabelMode::single)
    return Scalar(1) / std::sqrt(static_cast<Scalar>(ind.classes()));
  const Matrix<Scalar> small =
      ind.normalized.transpose() * ind.weights.cwiseInverse().asDiagonal() * ind.normalized;
  return Scalar(1) / small.norm();
}

// O(n^2) reference for alignment_constant, straight from the n x n kernel.
template <typename Scalar>
Scalar alignment_constant_dense(const IndicatorSet<Scalar>& ind) {
  const Matrix<Scalar> m =
      ind.weights.cwiseInverse().asDiagonal() * (ind.normalized * ind.normalized.transpose());
  return Scalar(1) / std::sqrt(trace_of_square(m));
}

/// J1(G) = Tr(G^T Sb G) / sqrt(Tr((G^T St G)^2)).
///
/// G is expected to have orthonormal columns but this is not checked: the
/// ratio is homogeneous of degree zero in G and is also evaluated off the
/// manifold by finite-difference checks.
template <typename Derived>
typename Derived::Scalar objective_j1(const Eigen::MatrixBase<Derived>& g,
                                      const ScatterSet<typename Derived::Scalar>& s) {
  using Scalar = typename Derived::Scalar;
  detail::require_dims(g.rows() == s.dim(), "objective_j1: G has " + std::to_string(g.rows()) +
                                                " rows, scatter dimension is " +
                                                std::to_string(s.dim()));
  const Matrix<Scalar> reduced_total = g.transpose() * s.total * g;
  const Scalar denom_sq = trace_of_square(reduced_total);
  if (!(denom_sq >= Scalar(1e-300))) throw DegenerateSubspace("objective_j1: Tr((G^T St G)^2) ~ 0");
  const Scalar numer = (g.transpose() * s.between * g).trace();
  return numer / std::sqrt(denom_sq);
}

template <typename Scalar>
struct AlignmentIdentity {
  Scalar lhs;  // alignment of the kernels built from G^T X
  Scalar rhs;  // c * J1(G)
};

/// Evaluates both sides of the subspace alignment identity on centered data:
/// the alignment of the kernels built from G^T X against c times J1 computed
/// from the factored scatter matrices.
template <typename DerivedX, typename DerivedG>
AlignmentIdentity<typename DerivedX::Scalar> subspace_alignment_identity_check(
    const Eigen::MatrixBase<DerivedX>& x, const IndicatorSet<typename DerivedX::Scalar>& ind,
    const Eigen::MatrixBase<DerivedG>& g) {
  using Scalar = typename DerivedX::Scalar;
  detail::require_dims(g.rows() == x.rows(), "identity check: G/X dimension mismatch");
  const Matrix<Scalar> projected = g.transpose() * x;
  const auto [k1, k2] = build_kernels(projected, ind);
  const Scalar lhs = kernel_alignment(k1, k2);
  const Scalar rhs = alignment_constant(ind) * objective_j1(g, scatter_matrices(x, ind));
  return {lhs, rhs};
}

}  // namespace kalda
