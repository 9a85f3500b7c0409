#pragma once

#include "kalda/common.hpp"
#include "kalda/dataset.hpp"
#include "kalda/methods.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace kalda {

/// Predicted class ids per sample. Single mode: exactly one id per sample.
/// Multi mode: possibly empty sets when no class clears the vote threshold.
struct PredictionSet {
  LabelMode mode;
  std::vector<std::vector<int>> sets;

  std::size_t size() const { return sets.size(); }
  int label(std::size_t i) const { return sets[i].front(); }
};

/// k-nearest-neighbour prediction with Euclidean distance in the projected
/// space (one column per sample).
///
/// Neighbours are ordered by (distance, training index). Single mode takes
/// the majority class among the knn nearest; a tie goes to whichever tied
/// class appears first in that order. Multi mode assigns class c when more
/// than knn/2 of the neighbours carry c.
template <typename DerivedA, typename DerivedB>
PredictionSet knn_predict(const Eigen::MatrixBase<DerivedA>& train,
                          const LabelAssignment& train_labels,
                          const Eigen::MatrixBase<DerivedB>& test, int knn) {
  using Scalar = typename DerivedA::Scalar;
  const auto n_train = static_cast<std::size_t>(train.cols());
  if (n_train == 0) throw DimensionError("knn_predict: empty training set");
  detail::require_dims(n_train == train_labels.size(), "knn_predict: training label count mismatch");
  detail::require_dims(train.rows() == test.rows(), "knn_predict: dimension mismatch");
  if (knn < 1 || static_cast<std::size_t>(knn) > n_train)
    throw DimensionError("knn_predict: knn must lie in [1, " + std::to_string(n_train) + "]");

  const auto num_classes = static_cast<std::size_t>(train_labels.num_classes());
  const auto kk = static_cast<std::size_t>(knn);
  PredictionSet out{train_labels.mode(), {}};
  out.sets.reserve(static_cast<std::size_t>(test.cols()));

  std::vector<std::pair<Scalar, std::size_t>> order(n_train);
  std::vector<int> votes(num_classes);
  for (Eigen::Index t = 0; t < test.cols(); ++t) {
    for (std::size_t j = 0; j < n_train; ++j)
      order[j] = {(train.col(static_cast<Eigen::Index>(j)) - test.col(t)).squaredNorm(), j};
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(kk), order.end());

    std::fill(votes.begin(), votes.end(), 0);
    for (std::size_t r = 0; r < kk; ++r)
      for (int c : train_labels.classes_of(order[r].second)) ++votes[static_cast<std::size_t>(c)];

    std::vector<int> predicted;
    if (out.mode == LabelMode::single) {
      const int best = *std::max_element(votes.begin(), votes.end());
      for (std::size_t r = 0; r < kk; ++r) {
        const int c = train_labels.label(order[r].second);
        if (votes[static_cast<std::size_t>(c)] == best) {
          predicted.push_back(c);
          break;
        }
      }
    } else {
      for (std::size_t c = 0; c < num_classes; ++c)
        if (2 * votes[c] > knn) predicted.push_back(static_cast<int>(c));
    }
    out.sets.push_back(std::move(predicted));
  }
  return out;
}

struct Scores {
  double accuracy = 0;
  double macro_f1 = 0;
  double micro_f1 = 0;
};

namespace detail {

struct BinaryCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

inline double safe_ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

// F1 from counts; an undefined precision or recall counts as zero.
inline double f1_score(std::size_t tp, std::size_t fp, std::size_t fn) {
  const double precision = safe_ratio(tp, tp + fp);
  const double recall = safe_ratio(tp, tp + fn);
  return precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

inline std::vector<BinaryCounts> per_class_counts(const PredictionSet& pred,
                                                  const LabelAssignment& truth) {
  require_dims(pred.size() == truth.size(), "score: prediction/truth size mismatch");
  const auto num_classes = static_cast<std::size_t>(truth.num_classes());
  std::vector<BinaryCounts> counts(num_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto& p = pred.sets[i];
    for (std::size_t c = 0; c < num_classes; ++c) {
      const bool predicted = std::find(p.begin(), p.end(), static_cast<int>(c)) != p.end();
      const bool actual = truth.has(i, static_cast<int>(c));
      auto& k = counts[c];
      if (predicted && actual) ++k.tp;
      else if (predicted) ++k.fp;
      else if (actual) ++k.fn;
      else ++k.tn;
    }
  }
  return counts;
}

inline void fill_f1(const std::vector<BinaryCounts>& counts, Scores& s) {
  BinaryCounts pooled;
  double macro = 0;
  for (const auto& k : counts) {
    macro += f1_score(k.tp, k.fp, k.fn);
    pooled.tp += k.tp;
    pooled.fp += k.fp;
    pooled.fn += k.fn;
  }
  s.macro_f1 = counts.empty() ? 0.0 : macro / static_cast<double>(counts.size());
  s.micro_f1 = f1_score(pooled.tp, pooled.fp, pooled.fn);
}

}  // namespace detail

/// Exact-match accuracy plus one-vs-rest macro and micro F1.
inline Scores score_single(const PredictionSet& pred, const LabelAssignment& truth) {
  if (pred.mode != LabelMode::single || truth.mode() != LabelMode::single)
    throw Unsupported("score_single: single-label predictions and truth required");
  const auto counts = detail::per_class_counts(pred, truth);
  Scores s;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (pred.sets[i].size() == 1 && pred.label(i) == truth.label(i)) ++correct;
  s.accuracy = detail::safe_ratio(correct, truth.size());
  detail::fill_f1(counts, s);
  return s;
}

/// Macro accuracy (per-class binary accuracy averaged over classes) plus
/// macro and micro F1 over the per-class binary decisions.
inline Scores score_multi(const PredictionSet& pred, const LabelAssignment& truth) {
  if (pred.mode != LabelMode::multi || truth.mode() != LabelMode::multi)
    throw Unsupported("score_multi: multi-label predictions and truth required");
  const auto counts = detail::per_class_counts(pred, truth);
  Scores s;
  double acc = 0;
  for (const auto& k : counts) acc += detail::safe_ratio(k.tp + k.tn, truth.size());
  s.accuracy = counts.empty() ? 0.0 : acc / static_cast<double>(counts.size());
  detail::fill_f1(counts, s);
  return s;
}

inline Scores score(const PredictionSet& pred, const LabelAssignment& truth) {
  return truth.mode() == LabelMode::single ? score_single(pred, truth) : score_multi(pred, truth);
}

struct EvalReport {
  std::vector<Scores> folds;
  Scores mean;
  Scores stddev;  // sample standard deviation across folds
  std::vector<std::size_t> fold_of_sample;
  std::vector<std::vector<int>> predictions;  // per sample, from its held-out fold
};

/// Seeded shuffle split into `folds` contiguous chunks of the permutation.
inline std::vector<std::size_t> assign_folds(std::size_t n, std::size_t folds,
                                             std::uint64_t seed) {
  if (folds < 2) throw DimensionError("cross-validation needs at least 2 folds");
  if (folds > n) throw DimensionError("more folds than samples");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::size_t> fold_of(n);
  for (std::size_t f = 0; f < folds; ++f)
    for (std::size_t r = f * n / folds; r < (f + 1) * n / folds; ++r) fold_of[perm[r]] = f;
  return fold_of;
}

/// Learns a subspace model from uncentered training data.
using SubspaceFitter =
    std::function<SubspaceModel<double>(const MatrixXd&, const LabelAssignment&)>;

/// k-fold cross-validation of any subspace method followed by KNN.
///
/// Per fold: fit on the training part (the fitter centers with the training
/// mean), project both parts with that model, predict the held-out samples,
/// and score. Throws FoldError when a training part lacks a class.
inline EvalReport cross_validate(const MatrixXd& x, const LabelAssignment& labels,
                                 const SubspaceFitter& fitter, std::size_t folds, int knn,
                                 std::uint64_t seed) {
  detail::require_dims(static_cast<std::size_t>(x.cols()) == labels.size(),
                       "cross_validate: data/label sample count mismatch");
  const std::size_t n = labels.size();
  EvalReport report;
  report.fold_of_sample = assign_folds(n, folds, seed);
  report.predictions.assign(n, {});

  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < n; ++i)
      (report.fold_of_sample[i] == f ? test_idx : train_idx).push_back(i);
    const LabelAssignment train_labels = labels.subset(train_idx);
    if (auto missing = train_labels.missing_class()) throw FoldError(f, *missing);
    const LabelAssignment test_labels = labels.subset(test_idx);

    const MatrixXd train_x = select_samples(x, train_idx);
    const auto model = fitter(train_x, train_labels);
    const MatrixXd train_proj = model.transform(train_x);
    const MatrixXd test_proj = model.transform(select_samples(x, test_idx));
    const PredictionSet pred = knn_predict(train_proj, train_labels, test_proj, knn);
    report.folds.push_back(score(pred, test_labels));
    for (std::size_t t = 0; t < test_idx.size(); ++t) report.predictions[test_idx[t]] = pred.sets[t];
  }

  const double count = static_cast<double>(folds);
  auto field_stats = [&](double Scores::*field, double& mean, double& sd) {
    double sum = 0;
    for (const auto& s : report.folds) sum += s.*field;
    mean = sum / count;
    double ss = 0;
    for (const auto& s : report.folds) ss += (s.*field - mean) * (s.*field - mean);
    sd = std::sqrt(ss / (count - 1));
  };
  field_stats(&Scores::accuracy, report.mean.accuracy, report.stddev.accuracy);
  field_stats(&Scores::macro_f1, report.mean.macro_f1, report.stddev.macro_f1);
  field_stats(&Scores::micro_f1, report.mean.micro_f1, report.stddev.micro_f1);
  return report;
}

/// Cross-validation of a named method.
inline EvalReport cross_validate(const MatrixXd& x, const LabelAssignment& labels, Method method,
                                 Eigen::Index k, std::size_t folds, int knn, std::uint64_t seed,
                                 const OptConfig& cfg = {}) {
  if (method == Method::mmc && labels.mode() == LabelMode::multi)
    throw Unsupported("MMC is not defined for multi-label data");
  const SubspaceFitter fitter = [&](const MatrixXd& train, const LabelAssignment& train_labels) {
    return fit_subspace(train, train_labels, method, k, cfg);
  };
  return cross_validate(x, labels, fitter, folds, knn, seed);
}

}  // namespace kalda
