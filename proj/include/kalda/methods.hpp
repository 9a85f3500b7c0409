#pragma once

#include "kalda/baselines.hpp"
#include "kalda/dataset.hpp"
#include "kalda/kalda.hpp"
#include "kalda/scatter.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace kalda {

enum class Method { kalda, lda, tr, mmc };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::kalda: return "kalda";
    case Method::lda: return "lda";
    case Method::tr: return "tr";
    case Method::mmc: return "mmc";
  }
  return "unknown";
}

inline std::optional<Method> parse_method(std::string_view name) {
  if (name == "kalda") return Method::kalda;
  if (name == "lda") return Method::lda;
  if (name == "tr") return Method::tr;
  if (name == "mmc") return Method::mmc;
  return std::nullopt;
}

/// A fitted linear subspace: project new data as G^T (x - mean).
template <typename Scalar>
struct SubspaceModel {
  Matrix<Scalar> projection;
  CenteringInfo<Scalar> centering;
  std::optional<FitTrace<Scalar>> trace;  // kaLDA only
  std::optional<Scalar> objective;        // J1 of the returned projection, when defined

  template <typename Derived>
  Matrix<Scalar> transform(const Eigen::MatrixBase<Derived>& x) const {
    return projection.transpose() * apply_centering(x, centering);
  }
};

/// Fit a named method on uncentered training data.
///
/// Classical LDA returns the raw generalized eigenvectors (not orthonormal),
/// which is the usual LDA embedding. TR, MMC and kaLDA return orthonormal G.
template <typename Derived>
SubspaceModel<typename Derived::Scalar> fit_subspace(const Eigen::MatrixBase<Derived>& x,
                                                     const LabelAssignment& labels, Method method,
                                                     Eigen::Index k, const OptConfig& cfg = {}) {
  using Scalar = typename Derived::Scalar;
  if (k < 1 || k > x.rows())
    throw DimensionError(std::string(to_string(method)) + ": k = " + std::to_string(k) +
                         " outside [1, " + std::to_string(x.rows()) + "]");
  if (method == Method::kalda) {
    auto fit = fit_kalda(x, labels, k, cfg);
    const Scalar j1 = fit.trace.best_objective();
    return {std::move(fit.projection), std::move(fit.centering), std::move(fit.trace), j1};
  }
  auto [centered, centering] = center(x, labels);
  const auto ind = build_indicators<Scalar>(labels);
  const auto s = scatter_matrices(centered, ind);
  Matrix<Scalar> g;
  switch (method) {
    case Method::lda: g = fit_classical_lda(s, k).eigenvectors; break;
    case Method::tr: g = fit_trace_ratio(s, k).projection; break;
    case Method::mmc: g = fit_mmc(s, k).projection; break;
    case Method::kalda: break;
  }
  std::optional<Scalar> j1;
  if (method != Method::lda) {
    try {
      j1 = objective_j1(g, s);
    } catch (const DegenerateSubspace&) {
    }
  }
  return {std::move(g), std::move(centering), std::nullopt, j1};
}

}  // namespace kalda
