#pragma once

#include "kalda/alignment.hpp"
#include "kalda/baselines.hpp"
#include "kalda/common.hpp"
#include "kalda/dataset.hpp"
#include "kalda/scatter.hpp"
#include "kalda/stiefel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace kalda {

struct OptConfig {
  double tau = 0.005;
  int max_iters = 1000;
  double rel_tol = 1e-8;
  double reortho_threshold = 1e-10;
  std::uint64_t seed = 0;

  static constexpr double kMinTau = 1e-5;
  static constexpr double kMaxTau = 0.1;

  void validate() const {
    if (!(tau >= kMinTau && tau <= kMaxTau))
      throw DimensionError("tau must lie in [1e-5, 0.1], got " + std::to_string(tau));
    if (max_iters < 1) throw DimensionError("max_iters must be positive");
    if (!(rel_tol > 0)) throw DimensionError("rel_tol must be positive");
    if (!(reortho_threshold > 0)) throw DimensionError("reortho_threshold must be positive");
  }
};

// Largest decrease of J1 an accepted step may cause.
inline constexpr double kAscentSlack = 1e-9;
inline constexpr int kMaxHalvings = 20;

enum class InitKind { classical_lda, between_eigenvectors, random };

inline const char* to_string(InitKind kind) {
  switch (kind) {
    case InitKind::classical_lda: return "classical_lda";
    case InitKind::between_eigenvectors: return "between_eigenvectors";
    case InitKind::random: return "random";
  }
  return "unknown";
}

template <typename Scalar>
struct FitTrace {
  std::vector<Scalar> objective_values;  // J1 before the first step, then after each step
  std::vector<Scalar> step_sizes;        // eta actually applied at each step
  int iterations_run = 0;
  bool converged = false;
  int best_iteration = 0;  // index into objective_values of the returned projection

  Scalar best_objective() const { return objective_values[static_cast<std::size_t>(best_iteration)]; }
};

// Called with (iteration, G) after the initial projection and after every
// accepted step.
template <typename Scalar>
using IterationObserver = std::function<void(int, const Matrix<Scalar>&)>;

template <typename Scalar>
struct OptimizeResult {
  Matrix<Scalar> projection;
  FitTrace<Scalar> trace;
};

/// Stiefel-manifold gradient ascent on J1 from a given starting point.
///
/// Each step moves G along the tangent gradient with the normalized step
/// eta = tau ||G||_1 / ||P||_1 and re-projects onto the manifold whenever
/// ||G^T G - I||_F exceeds cfg.reortho_threshold. A step that would lower J1
/// by more than kAscentSlack is halved, up to kMaxHalvings times; if that
/// still fails the run stops unconverged.
///
/// Near a stationary point the fixed normalized step can overshoot by a
/// rounding-sized amount, so the returned projection is the best iterate
/// seen (trace.best_iteration), never worse than the start.
template <typename Scalar>
OptimizeResult<Scalar> optimize_j1(const ScatterSet<Scalar>& s, const Matrix<Scalar>& init,
                                   const OptConfig& cfg,
                                   const IterationObserver<Scalar>& observer = {}) {
  cfg.validate();
  detail::require_dims(init.rows() == s.dim(), "optimize_j1: init/scatter dimension mismatch");
  const auto tau = static_cast<Scalar>(cfg.tau);
  const auto slack = static_cast<Scalar>(kAscentSlack);
  const auto rel_tol = static_cast<Scalar>(cfg.rel_tol);
  const auto reortho = static_cast<Scalar>(cfg.reortho_threshold);

  OptimizeResult<Scalar> out{reorthonormalize(init), {}};
  Matrix<Scalar>& g = out.projection;
  FitTrace<Scalar>& trace = out.trace;
  Scalar current = objective_j1(g, s);
  trace.objective_values.push_back(current);
  if (observer) observer(0, g);
  Matrix<Scalar> best = g;
  Scalar best_value = current;

  for (int it = 0; it < cfg.max_iters; ++it) {
    const Matrix<Scalar> tangent = stiefel_tangent(g, gradient_j1(g, s));
    const auto eta0 = step_size(g, tangent, tau);
    if (!eta0) {
      trace.converged = true;
      break;
    }

    Scalar eta = *eta0;
    Matrix<Scalar> candidate;
    Scalar next = 0;
    bool accepted = false;
    for (int halving = 0; halving <= kMaxHalvings; ++halving, eta /= Scalar(2)) {
      candidate = g + eta * tangent;
      if (orthonormality_error(candidate) > reortho) candidate = reorthonormalize(candidate);
      next = objective_j1(candidate, s);
      if (next >= current - slack) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;

    g = std::move(candidate);
    trace.objective_values.push_back(next);
    trace.step_sizes.push_back(eta);
    ++trace.iterations_run;
    if (observer) observer(trace.iterations_run, g);
    if (next > best_value) {
      best_value = next;
      best = g;
      trace.best_iteration = trace.iterations_run;
    }
    const Scalar change = std::abs(next - current) / std::max(std::abs(current), Scalar(1e-12));
    current = next;
    if (change < rel_tol) {
      trace.converged = true;
      break;
    }
  }
  if (trace.best_iteration != trace.iterations_run) g = std::move(best);
  return out;
}

template <typename Scalar>
struct InitialProjection {
  Matrix<Scalar> projection;  // orthonormal p x k
  InitKind kind;
};

/// Orthonormalized classical-LDA eigenvectors; if that fails, the leading
/// eigenvectors of Sb; if that fails too, a seeded random orthonormal matrix.
template <typename Scalar>
InitialProjection<Scalar> initial_projection(const ScatterSet<Scalar>& s, Eigen::Index k,
                                             std::uint64_t seed) {
  auto usable = [&](const Matrix<Scalar>& g) {
    try {
      objective_j1(g, s);
      return true;
    } catch (const DegenerateSubspace&) {
      return false;
    }
  };
  try {
    Matrix<Scalar> g = reorthonormalize(fit_classical_lda(s, k).eigenvectors);
    if (usable(g)) return {std::move(g), InitKind::classical_lda};
  } catch (const DegenerateProblem&) {
  } catch (const RankDeficient&) {
  }
  try {
    if (s.between.cwiseAbs().maxCoeff() > Scalar(0)) {
      Matrix<Scalar> g = top_eigenpairs(s.between, k).vectors;
      if (usable(g)) return {std::move(g), InitKind::between_eigenvectors};
    }
  } catch (const DegenerateProblem&) {
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix<Scalar> g(s.dim(), k);
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = static_cast<Scalar>(normal(rng));
  return {reorthonormalize(g), InitKind::random};
}

template <typename Scalar>
struct KaldaFit {
  Matrix<Scalar> projection;  // orthonormal p x k
  FitTrace<Scalar> trace;
  CenteringInfo<Scalar> centering;
  InitKind init;
};

/// Full kernel-alignment LDA fit: center, build indicators and the factored
/// scatter matrices for the label regime, initialize, run optimize_j1.
template <typename Derived>
KaldaFit<typename Derived::Scalar> fit_kalda(const Eigen::MatrixBase<Derived>& x,
                                             const LabelAssignment& labels, Eigen::Index k,
                                             const OptConfig& cfg = {},
                                             const IterationObserver<typename Derived::Scalar>&
                                                 observer = {}) {
  using Scalar = typename Derived::Scalar;
  cfg.validate();
  if (k < 1 || k > x.rows())
    throw DimensionError("kaLDA: k = " + std::to_string(k) + " outside [1, " +
                         std::to_string(x.rows()) + "]");
  auto [centered, centering] = center(x, labels);
  const auto ind = build_indicators<Scalar>(labels);
  const auto s = scatter_matrices(centered, ind);
  auto init = initial_projection(s, k, cfg.seed);
  auto result = optimize_j1(s, init.projection, cfg, observer);
  return {std::move(result.projection), std::move(result.trace), std::move(centering),
          init.kind};
}

}  // namespace kalda
