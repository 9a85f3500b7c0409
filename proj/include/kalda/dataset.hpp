#pragma once

#include "kalda/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kalda {

/// Feature matrix, one column per sample (p features x n samples).
/// Entries are finite; the shape never changes after construction.
template <typename Scalar>
class DataMatrix {
 public:
  explicit DataMatrix(Matrix<Scalar> values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1)
      throw DataError("data matrix must have at least one feature and one sample", 0);
    if (!values_.allFinite()) throw DataError("data matrix has non-finite entries", 0);
  }

  const Matrix<Scalar>& values() const { return values_; }
  Eigen::Index features() const { return values_.rows(); }
  Eigen::Index samples() const { return values_.cols(); }

 private:
  Matrix<Scalar> values_;
};

/// Per-sample class membership over classes 0..K-1.
///
/// Each sample carries a sorted, duplicate-free, non-empty set of class ids.
/// In single mode every set has exactly one id. Empty classes are allowed on
/// the type itself (a held-out fold need not contain every class); anything
/// that divides by a class count calls require_all_classes_present().
class LabelAssignment {
 public:
  LabelAssignment(std::vector<std::vector<int>> memberships, int num_classes,
                  LabelMode mode)
      : sets_(std::move(memberships)), num_classes_(num_classes), mode_(mode) {
    if (num_classes_ < 1) throw LabelError("class count must be positive");
    for (std::size_t i = 0; i < sets_.size(); ++i) {
      auto& set = sets_[i];
      if (set.empty()) throw LabelError("empty labels", i + 1);
      std::sort(set.begin(), set.end());
      if (std::adjacent_find(set.begin(), set.end()) != set.end())
        throw LabelError("duplicate class id", i + 1);
      if (set.front() < 0 || set.back() >= num_classes_)
        throw LabelError("class id out of range [0, " + std::to_string(num_classes_) + ")",
                         i + 1);
      if (mode_ == LabelMode::single && set.size() != 1)
        throw LabelError("single-label mode requires exactly one class id", i + 1);
    }
  }

  static LabelAssignment single(const std::vector<int>& ids, int num_classes) {
    std::vector<std::vector<int>> sets;
    sets.reserve(ids.size());
    for (int id : ids) sets.push_back({id});
    return LabelAssignment(std::move(sets), num_classes, LabelMode::single);
  }

  LabelMode mode() const { return mode_; }
  int num_classes() const { return num_classes_; }
  std::size_t size() const { return sets_.size(); }

  const std::vector<int>& classes_of(std::size_t i) const { return sets_[i]; }
  const std::vector<std::vector<int>>& memberships() const { return sets_; }

  // Single-mode class id of sample i.
  int label(std::size_t i) const { return sets_[i].front(); }

  // rho_i, the number of classes sample i belongs to.
  int weight(std::size_t i) const { return static_cast<int>(sets_[i].size()); }

  bool has(std::size_t i, int class_id) const {
    return std::binary_search(sets_[i].begin(), sets_[i].end(), class_id);
  }

  std::vector<std::size_t> class_counts() const {
    std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes_), 0);
    for (const auto& set : sets_)
      for (int id : set) ++counts[static_cast<std::size_t>(id)];
    return counts;
  }

  // First class with no members, if any.
  std::optional<int> missing_class() const {
    const auto counts = class_counts();
    for (std::size_t k = 0; k < counts.size(); ++k)
      if (counts[k] == 0) return static_cast<int>(k);
    return std::nullopt;
  }

  void require_all_classes_present() const {
    if (auto k = missing_class())
      throw LabelError("class " + std::to_string(*k) + " has no members");
  }

  bool every_sample_single() const {
    return std::all_of(sets_.begin(), sets_.end(),
                       [](const auto& s) { return s.size() == 1; });
  }

  // Reinterpret under another mode. Going to single fails on any multi-id sample.
  LabelAssignment with_mode(LabelMode mode) const {
    return LabelAssignment(sets_, num_classes_, mode);
  }

  LabelAssignment subset(const std::vector<std::size_t>& indices) const {
    std::vector<std::vector<int>> sets;
    sets.reserve(indices.size());
    for (std::size_t i : indices) sets.push_back(sets_.at(i));
    return LabelAssignment(std::move(sets), num_classes_, mode_);
  }

 private:
  std::vector<std::vector<int>> sets_;
  int num_classes_;
  LabelMode mode_;
};

/// Indicator matrices derived from a label assignment.
///
/// `membership` is the binary n x K matrix Z, `normalized` has entries
/// 1/sqrt(count_k) where Z is one (this is Y in single mode and Y-tilde in
/// multi mode), `weights` is the diagonal of Omega (row sums of Z). In single
/// mode the weights are all one and `normalized` satisfies Y^T Y = I.
template <typename Scalar>
struct IndicatorSet {
  LabelMode mode;
  Matrix<Scalar> membership;
  Matrix<Scalar> normalized;
  Vector<Scalar> weights;

  Eigen::Index samples() const { return membership.rows(); }
  Eigen::Index classes() const { return membership.cols(); }
};

template <typename Scalar = double>
IndicatorSet<Scalar> build_indicators(const LabelAssignment& labels) {
  labels.require_all_classes_present();
  const auto n = static_cast<Eigen::Index>(labels.size());
  const auto num_classes = static_cast<Eigen::Index>(labels.num_classes());
  const auto counts = labels.class_counts();

  IndicatorSet<Scalar> out{labels.mode(), Matrix<Scalar>::Zero(n, num_classes),
                           Matrix<Scalar>::Zero(n, num_classes), Vector<Scalar>(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& set = labels.classes_of(static_cast<std::size_t>(i));
    for (int k : set) {
      out.membership(i, k) = Scalar(1);
      out.normalized(i, k) =
          Scalar(1) / std::sqrt(static_cast<Scalar>(counts[static_cast<std::size_t>(k)]));
    }
    out.weights(i) = static_cast<Scalar>(set.size());
  }
  return out;
}

/// Mean removed from the training data, kept so that other data can be
/// centered consistently.
template <typename Scalar>
struct CenteringInfo {
  Vector<Scalar> mean;
  LabelMode mode;
};

/// Single mode subtracts the ordinary mean. Multi mode subtracts the
/// rho-weighted mean sum_i rho_i x_i / sum_i rho_i, so that the weighted
/// column sum of the result vanishes.
template <typename Derived>
std::pair<Matrix<typename Derived::Scalar>, CenteringInfo<typename Derived::Scalar>> center(
    const Eigen::MatrixBase<Derived>& x, const LabelAssignment& labels) {
  using Scalar = typename Derived::Scalar;
  detail::require_dims(static_cast<std::size_t>(x.cols()) == labels.size(),
                       "center: data has " + std::to_string(x.cols()) + " samples, labels have " +
                           std::to_string(labels.size()));
  Vector<Scalar> mean;
  if (labels.mode() == LabelMode::single) {
    mean = x.rowwise().mean();
  } else {
    Vector<Scalar> rho(x.cols());
    for (Eigen::Index i = 0; i < x.cols(); ++i)
      rho(i) = static_cast<Scalar>(labels.weight(static_cast<std::size_t>(i)));
    mean = (x * rho) / rho.sum();
  }
  Matrix<Scalar> centered = x.colwise() - mean;
  return {std::move(centered), CenteringInfo<Scalar>{std::move(mean), labels.mode()}};
}

template <typename Derived>
Matrix<typename Derived::Scalar> apply_centering(
    const Eigen::MatrixBase<Derived>& x, const CenteringInfo<typename Derived::Scalar>& info) {
  detail::require_dims(x.rows() == info.mean.size(),
                       "data has " + std::to_string(x.rows()) + " features, centering expects " +
                           std::to_string(info.mean.size()));
  return x.colwise() - info.mean;
}

// Columns of x selected by index.
template <typename Derived>
Matrix<typename Derived::Scalar> select_samples(const Eigen::MatrixBase<Derived>& x,
                                                const std::vector<std::size_t>& indices) {
  Matrix<typename Derived::Scalar> out(x.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j)
    out.col(static_cast<Eigen::Index>(j)) = x.col(static_cast<Eigen::Index>(indices[j]));
  return out;
}

// File loading. Features: numeric CSV, one row per sample; the result is
// transposed to p x n. Labels: one line per sample with space-separated
// non-negative integer class ids.
DataMatrix<double> parse_features(std::istream& in);
DataMatrix<double> load_features(const std::string& path);

LabelAssignment parse_labels(std::istream& in, std::optional<int> num_classes = std::nullopt);
LabelAssignment load_labels(const std::string& path,
                            std::optional<int> num_classes = std::nullopt);

}  // namespace kalda
