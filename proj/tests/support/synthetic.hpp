#pragma once

// Test-only data generators.

#include "kalda/common.hpp"
#include "kalda/dataset.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace kalda::testing {

struct LabeledData {
  MatrixXd x;
  LabelAssignment labels;
};

// K isotropic unit-variance Gaussian classes in R^p with means on scaled
// coordinate axes, so every pair of class means is `separation` apart.
inline LabeledData gaussian_classes(int p, int per_class, int num_classes, double separation,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double offset = separation / std::sqrt(2.0);
  const int n = per_class * num_classes;
  MatrixXd x(p, n);
  std::vector<int> ids(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const int k = j % num_classes;
    ids[static_cast<std::size_t>(j)] = k;
    for (int f = 0; f < p; ++f) x(f, j) = normal(rng);
    x(k, j) += offset;
  }
  return {std::move(x), LabelAssignment::single(ids, num_classes)};
}

// The fixed instance used for convergence checks: p = 20, n = 90, 3 classes.
inline LabeledData standard_instance(std::uint64_t seed = 0) {
  return gaussian_classes(20, 30, 3, 6.0, seed);
}

// Random single-label data, every class non-empty.
inline LabeledData random_single(std::mt19937_64& rng, int p, int n, int num_classes) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, num_classes - 1);
  MatrixXd x(p, n);
  for (int j = 0; j < n; ++j)
    for (int f = 0; f < p; ++f) x(f, j) = normal(rng);
  std::vector<int> ids(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) ids[static_cast<std::size_t>(j)] = j < num_classes ? j : pick(rng);
  // class-dependent shift so Sb is not negligible
  for (int j = 0; j < n; ++j) x.col(j).array() += 0.5 * ids[static_cast<std::size_t>(j)];
  return {std::move(x), LabelAssignment::single(ids, num_classes)};
}

// Random multi-label data with rho_i drawn from [1, max_rho].
inline LabeledData random_multi(std::mt19937_64& rng, int p, int n, int num_classes,
                                int max_rho = 3) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd x(p, n);
  for (int j = 0; j < n; ++j)
    for (int f = 0; f < p; ++f) x(f, j) = normal(rng);
  std::vector<std::vector<int>> sets(static_cast<std::size_t>(n));
  std::uniform_int_distribution<int> rho_pick(1, std::min(max_rho, num_classes));
  for (int j = 0; j < n; ++j) {
    std::vector<int> classes(static_cast<std::size_t>(num_classes));
    for (int k = 0; k < num_classes; ++k) classes[static_cast<std::size_t>(k)] = k;
    std::shuffle(classes.begin(), classes.end(), rng);
    int rho = rho_pick(rng);
    auto& set = sets[static_cast<std::size_t>(j)];
    if (j < num_classes) set.push_back(j);
    for (int c : classes) {
      if (static_cast<int>(set.size()) >= rho) break;
      if (std::find(set.begin(), set.end(), c) == set.end()) set.push_back(c);
    }
    for (int c : set) x(c % p, j) += 0.7;
  }
  return {std::move(x), LabelAssignment(std::move(sets), num_classes, LabelMode::multi)};
}

inline MatrixXd random_orthonormal(std::mt19937_64& rng, Eigen::Index p, Eigen::Index k) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd a(p, k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < p; ++i) a(i, j) = normal(rng);
  Eigen::HouseholderQR<MatrixXd> qr(a);
  return qr.householderQ() * MatrixXd::Identity(p, k);
}

}  // namespace kalda::testing
