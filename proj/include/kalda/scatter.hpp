#pragma once

#include "kalda/common.hpp"
#include "kalda/dataset.hpp"

#include <optional>
#include <string>

namespace kalda {

/// Between-class (between), total (total) and, for single-label data,
/// within-class (within) scatter matrices. All are symmetrized on
/// construction. Multi-label data has no within-class scatter.
template <typename Scalar>
struct ScatterSet {
  Matrix<Scalar> between;
  Matrix<Scalar> total;
  std::optional<Matrix<Scalar>> within;

  Eigen::Index dim() const { return between.rows(); }
};

namespace detail {

template <typename Derived>
void require_samples(const Eigen::MatrixBase<Derived>& x, std::size_t n, const char* who) {
  require_dims(static_cast<std::size_t>(x.cols()) == n,
               std::string(who) + ": data has " + std::to_string(x.cols()) +
                   " samples, labels have " + std::to_string(n));
}

// Column k holds the mean of the samples that carry class k.
template <typename Derived>
Matrix<typename Derived::Scalar> class_means(const Eigen::MatrixBase<Derived>& x,
                                             const LabelAssignment& labels) {
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> means = Matrix<Scalar>::Zero(x.rows(), labels.num_classes());
  const auto counts = labels.class_counts();
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (int k : labels.classes_of(i)) means.col(k) += x.col(static_cast<Eigen::Index>(i));
  for (Eigen::Index k = 0; k < means.cols(); ++k)
    means.col(k) /= static_cast<Scalar>(counts[static_cast<std::size_t>(k)]);
  return means;
}

}  // namespace detail

/// Single-label scatter matrices from the per-class sums. The global mean is
/// recomputed from x; St is reported as Sb + Sw.
template <typename Derived>
ScatterSet<typename Derived::Scalar> scatter_single_def(const Eigen::MatrixBase<Derived>& x,
                                                        const LabelAssignment& labels) {
  using Scalar = typename Derived::Scalar;
  detail::require_samples(x, labels.size(), "scatter_single_def");
  if (labels.mode() != LabelMode::single)
    throw Unsupported("scatter_single_def requires single-label data");
  labels.require_all_classes_present();

  const Eigen::Index p = x.rows();
  const Vector<Scalar> mean = x.rowwise().mean();
  const Matrix<Scalar> means = detail::class_means(x, labels);
  const auto counts = labels.class_counts();

  Matrix<Scalar> sb = Matrix<Scalar>::Zero(p, p);
  for (Eigen::Index k = 0; k < means.cols(); ++k) {
    const Vector<Scalar> d = means.col(k) - mean;
    sb += static_cast<Scalar>(counts[static_cast<std::size_t>(k)]) * d * d.transpose();
  }
  Matrix<Scalar> sw = Matrix<Scalar>::Zero(p, p);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Vector<Scalar> d = x.col(static_cast<Eigen::Index>(i)) - means.col(labels.label(i));
    sw += d * d.transpose();
  }
  sb = symmetrized(sb);
  sw = symmetrized(sw);
  Matrix<Scalar> st = sb + sw;
  return {std::move(sb), std::move(st), std::move(sw)};
}

/// Factored single-label form: Sb = X Y Y^T X^T, St = X X^T, Sw = St - Sb.
/// Expects centered data.
template <typename Derived>
ScatterSet<typename Derived::Scalar> scatter_single_matrix(
    const Eigen::MatrixBase<Derived>& x, const IndicatorSet<typename Derived::Scalar>& ind) {
  using Scalar = typename Derived::Scalar;
  detail::require_dims(x.cols() == ind.samples(), "scatter_single_matrix: sample count mismatch");
  const Matrix<Scalar> xy = x * ind.normalized;
  Matrix<Scalar> sb = symmetrized(xy * xy.transpose());
  Matrix<Scalar> st = symmetrized(x * x.transpose());
  Matrix<Scalar> sw = st - sb;
  return {std::move(sb), std::move(st), std::move(sw)};
}

/// Multi-label scatter matrices from the per-class sums:
///   Sb = sum_k n_k (m_k - m)(m_k - m)^T
///   St = sum_k sum_i Z_ik (x_i - m)(x_i - m)^T
/// with m the rho-weighted global mean.
template <typename Derived>
ScatterSet<typename Derived::Scalar> scatter_multi_def(const Eigen::MatrixBase<Derived>& x,
                                                       const LabelAssignment& labels) {
  using Scalar = typename Derived::Scalar;
  detail::require_samples(x, labels.size(), "scatter_multi_def");
  labels.require_all_classes_present();

  const Eigen::Index p = x.rows();
  const auto counts = labels.class_counts();
  Vector<Scalar> mean = Vector<Scalar>::Zero(p);
  Scalar weight_sum = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto rho = static_cast<Scalar>(labels.weight(i));
    if (rho <= 0) throw LabelError("sample has no labels", i + 1);
    mean += rho * x.col(static_cast<Eigen::Index>(i));
    weight_sum += rho;
  }
  mean /= weight_sum;
  const Matrix<Scalar> means = detail::class_means(x, labels);

  Matrix<Scalar> sb = Matrix<Scalar>::Zero(p, p);
  for (Eigen::Index k = 0; k < means.cols(); ++k) {
    const Vector<Scalar> d = means.col(k) - mean;
    sb += static_cast<Scalar>(counts[static_cast<std::size_t>(k)]) * d * d.transpose();
  }
  Matrix<Scalar> st = Matrix<Scalar>::Zero(p, p);
  for (Eigen::Index k = 0; k < labels.num_classes(); ++k) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!labels.has(i, static_cast<int>(k))) continue;
      const Vector<Scalar> d = x.col(static_cast<Eigen::Index>(i)) - mean;
      st += d * d.transpose();
    }
  }
  return {symmetrized(sb), symmetrized(st), std::nullopt};
}

/// Factored multi-label form: Sb = X Yt Yt^T X^T, St = X Omega X^T.
/// Expects rho-weighted centered data.
template <typename Derived>
ScatterSet<typename Derived::Scalar> scatter_multi_matrix(
    const Eigen::MatrixBase<Derived>& x, const IndicatorSet<typename Derived::Scalar>& ind) {
  using Scalar = typename Derived::Scalar;
  detail::require_dims(x.cols() == ind.samples(), "scatter_multi_matrix: sample count mismatch");
  const Matrix<Scalar> xy = x * ind.normalized;
  Matrix<Scalar> sb = symmetrized(xy * xy.transpose());
  Matrix<Scalar> st = symmetrized(x * ind.weights.asDiagonal() * x.transpose());
  return {std::move(sb), std::move(st), std::nullopt};
}

/// Factored scatter matrices for whichever label regime the indicators carry.
template <typename Derived>
ScatterSet<typename Derived::Scalar> scatter_matrices(
    const Eigen::MatrixBase<Derived>& x, const IndicatorSet<typename Derived::Scalar>& ind) {
  return ind.mode == LabelMode::single ? scatter_single_matrix(x, ind)
                                       : scatter_multi_matrix(x, ind);
}

}  // namespace kalda
