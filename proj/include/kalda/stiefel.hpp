#pragma once

#include "kalda/alignment.hpp"
#include "kalda/common.hpp"
#include "kalda/scatter.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <optional>

namespace kalda {

/// Euclidean gradient of J1 with respect to G:
///   2 A / sqrt(Tr D^2) - 2 Tr(B) / (Tr D^2)^{3/2} C D
/// with A = Sb G, B = G^T A, C = St G, D = G^T C, and Tr D^2 = Tr(D D).
template <typename Derived>
Matrix<typename Derived::Scalar> gradient_j1(const Eigen::MatrixBase<Derived>& g,
                                             const ScatterSet<typename Derived::Scalar>& s) {
  using Scalar = typename Derived::Scalar;
  detail::require_dims(g.rows() == s.dim(), "gradient_j1: G/scatter dimension mismatch");
  const Matrix<Scalar> a = s.between * g;
  const Scalar trace_b = trace_of_product(g.transpose(), a);
  const Matrix<Scalar> c = s.total * g;
  const Matrix<Scalar> d = g.transpose() * c;
  const Scalar trace_d2 = trace_of_square(d);
  if (!(trace_d2 >= Scalar(1e-300))) throw DegenerateSubspace("gradient_j1: Tr(D^2) ~ 0");
  const Scalar root = std::sqrt(trace_d2);
  return Scalar(2) / root * a - Scalar(2) * trace_b / (trace_d2 * root) * (c * d);
}

/// grad - G grad^T G. At an orthonormal G the result P has G^T P skew, so it
/// is tangent to the Stiefel manifold.
template <typename DerivedG, typename DerivedD>
Matrix<typename DerivedG::Scalar> stiefel_tangent(const Eigen::MatrixBase<DerivedG>& g,
                                                  const Eigen::MatrixBase<DerivedD>& grad) {
  detail::require_dims(g.rows() == grad.rows() && g.cols() == grad.cols(),
                       "stiefel_tangent: shape mismatch");
  return grad - g * (grad.transpose() * g);
}

/// eta = tau * ||G||_1 / ||P||_1 with entrywise 1-norms. Returns nullopt
/// when P vanishes (a stationary point).
template <typename DerivedG, typename DerivedP>
std::optional<typename DerivedG::Scalar> step_size(const Eigen::MatrixBase<DerivedG>& g,
                                                   const Eigen::MatrixBase<DerivedP>& pgrad,
                                                   typename DerivedG::Scalar tau) {
  using Scalar = typename DerivedG::Scalar;
  const Scalar denom = entrywise_l1(pgrad);
  if (!(denom >= Scalar(1e-300))) return std::nullopt;
  return tau * entrywise_l1(g) / denom;
}

/// G (G^T G)^{-1/2} through the symmetric eigendecomposition of G^T G.
/// Keeps the column span; a second pass runs if round-off leaves the
/// result visibly off the manifold.
template <typename Derived>
Matrix<typename Derived::Scalar> reorthonormalize(const Eigen::MatrixBase<Derived>& g_in) {
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> g = g_in;
  for (int pass = 0; pass < 3; ++pass) {
    const Matrix<Scalar> gram = g.transpose() * g;
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(gram);
    if (solver.info() != Eigen::Success) throw RankDeficient("reorthonormalize: eigensolver failed");
    const Vector<Scalar>& lambda = solver.eigenvalues();
    if (!(lambda.minCoeff() >= Scalar(1e-12) * lambda.maxCoeff()) || !(lambda.maxCoeff() > 0))
      throw RankDeficient("reorthonormalize: G is not of full column rank");
    const Matrix<Scalar>& v = solver.eigenvectors();
    g = g * (v * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose());
    if (orthonormality_error(g) < Scalar(1e-14)) break;
  }
  return g;
}

}  // namespace kalda
