#pragma once

#include "kalda/common.hpp"
#include "kalda/scatter.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace kalda {

template <typename Scalar>
struct SymmetricEigenPairs {
  Vector<Scalar> values;   // descending
  Matrix<Scalar> vectors;  // leading columns, orthonormal
};

/// Top-k eigenpairs of a symmetric matrix, eigenvalues in descending order.
/// Ties keep the order produced by the (deterministic) solver.
template <typename Derived>
SymmetricEigenPairs<typename Derived::Scalar> top_eigenpairs(const Eigen::MatrixBase<Derived>& m,
                                                             Eigen::Index k) {
  using Scalar = typename Derived::Scalar;
  detail::require_dims(m.rows() == m.cols(), "top_eigenpairs: matrix must be square");
  detail::require_dims(k >= 1 && k <= m.rows(), "top_eigenpairs: k must lie in [1, p]");
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(symmetrized(m));
  if (solver.info() != Eigen::Success) throw DegenerateProblem("symmetric eigensolver failed");
  return {solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse().leftCols(k)};
}

template <typename Scalar>
struct GeneralizedEigenSolution {
  Vector<Scalar> eigenvalues;   // all p values, descending
  Matrix<Scalar> eigenvectors;  // p x k, St_reg-orthonormal, not Euclidean-orthonormal
};

/// Ridge added to St before inverting: 1e-6 * Tr(St) / p.
template <typename Scalar>
Scalar total_scatter_ridge(const Matrix<Scalar>& total) {
  return Scalar(1e-6) * total.trace() / static_cast<Scalar>(total.rows());
}

/// Classical LDA: leading eigenvectors of St_reg^{-1} Sb, solved as the
/// symmetric-definite problem Sb v = lambda St_reg v.
template <typename Scalar>
GeneralizedEigenSolution<Scalar> fit_classical_lda(const ScatterSet<Scalar>& s, Eigen::Index k) {
  const Eigen::Index p = s.dim();
  if (k < 1 || k > p)
    throw DimensionError("classical LDA: k = " + std::to_string(k) + " outside [1, " +
                         std::to_string(p) + "]");
  if (s.between.cwiseAbs().maxCoeff() == Scalar(0))
    throw DegenerateProblem("classical LDA: between-class scatter is zero");
  const Scalar ridge = total_scatter_ridge(s.total);
  if (!(ridge > Scalar(0))) throw DegenerateProblem("classical LDA: total scatter is zero");

  const Matrix<Scalar> total_reg = s.total + ridge * Matrix<Scalar>::Identity(p, p);
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix<Scalar>> solver(
      s.between, total_reg, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success)
    throw DegenerateProblem("classical LDA: generalized eigensolver failed");
  return {solver.eigenvalues().reverse(),
          solver.eigenvectors().rowwise().reverse().leftCols(k)};
}

template <typename Scalar>
struct TraceRatioResult {
  Matrix<Scalar> projection;     // orthonormal p x k
  Scalar ratio;                  // Tr(G^T Sb G) / Tr(G^T St G)
  std::vector<Scalar> history;   // lambda_0 = 0, lambda_1, ...
  bool converged;
};

/// Trace ratio: maximize Tr(G^T Sb G) / Tr(G^T St G) over orthonormal G by
/// the iteration G <- top-k eigenvectors of (Sb - lambda St), lambda <- ratio(G),
/// starting from lambda = 0. The ratio sequence is non-decreasing.
template <typename Scalar>
TraceRatioResult<Scalar> fit_trace_ratio(const ScatterSet<Scalar>& s, Eigen::Index k,
                                         Scalar tol = Scalar(1e-10), int max_iters = 200) {
  const Eigen::Index p = s.dim();
  if (k < 1 || k > p)
    throw DimensionError("trace ratio: k = " + std::to_string(k) + " outside [1, " +
                         std::to_string(p) + "]");
  if (s.total.norm() == Scalar(0)) throw DegenerateProblem("trace ratio: total scatter is zero");

  auto ratio_of = [&](const Matrix<Scalar>& g) {
    const Scalar denom = (g.transpose() * s.total * g).trace();
    if (!(denom > Scalar(0)))
      throw DegenerateSubspace("trace ratio: Tr(G^T St G) vanished on the current subspace");
    return (g.transpose() * s.between * g).trace() / denom;
  };

  TraceRatioResult<Scalar> out{Matrix<Scalar>(), Scalar(0), {Scalar(0)}, false};
  Scalar lambda = 0;
  Matrix<Scalar> best;
  Scalar best_ratio = -std::numeric_limits<Scalar>::infinity();
  for (int it = 0; it < max_iters; ++it) {
    Matrix<Scalar> g = top_eigenpairs(s.between - lambda * s.total, k).vectors;
    const Scalar next = ratio_of(g);
    // The exact iteration never lowers lambda; a drop can only be rounding
    // once the subspace has settled, so keep the previous iterate and stop.
    if (next < lambda) {
      out.converged = lambda - next < tol;
      break;
    }
    out.history.push_back(next);
    if (next > best_ratio) {
      best_ratio = next;
      best = g;
    }
    const bool done = std::abs(next - lambda) < tol;
    lambda = next;
    if (done) {
      out.converged = true;
      break;
    }
  }
  out.projection = std::move(best);
  out.ratio = best_ratio;
  return out;
}

template <typename Scalar>
struct MmcResult {
  Matrix<Scalar> projection;  // orthonormal p x k
  Vector<Scalar> eigenvalues; // all p eigenvalues of Sb - Sw, descending
};

/// Maximum margin criterion: leading eigenvectors of Sb - Sw. Needs the
/// within-class scatter, so single-label data only.
template <typename Scalar>
MmcResult<Scalar> fit_mmc(const ScatterSet<Scalar>& s, Eigen::Index k) {
  if (!s.within) throw Unsupported("MMC needs a within-class scatter (single-label data only)");
  const Eigen::Index p = s.dim();
  if (k < 1 || k > p)
    throw DimensionError("MMC: k = " + std::to_string(k) + " outside [1, " + std::to_string(p) +
                         "]");
  auto all = top_eigenpairs(s.between - *s.within, p);
  return {all.vectors.leftCols(k), all.values};
}

}  // namespace kalda
