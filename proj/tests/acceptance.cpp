// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include "cli.hpp"
#include "kalda/alignment.hpp"
#include "kalda/baselines.hpp"
#include "kalda/eval.hpp"
#include "kalda/kalda.hpp"
#include "support/files.hpp"
#include "support/synthetic.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace kalda;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double rel_fro(const MatrixXd& a, const MatrixXd& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

// The random suite shared by the identity criteria.
struct Instance {
  testing::LabeledData data;
  MatrixXd centered;
  IndicatorSet<double> ind;
  int num_classes;
};

std::vector<Instance> random_suite(LabelMode mode, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pdist(1, 15), ndist(10, 60), kdist(2, 5);
  std::vector<Instance> out;
  for (int t = 0; t < count; ++t) {
    const int p = pdist(rng), n = ndist(rng), k = kdist(rng);
    auto d = mode == LabelMode::single ? testing::random_single(rng, p, n, k)
                                       : testing::random_multi(rng, p, n, k, 3);
    auto [c, info] = center(d.x, d.labels);
    auto ind = build_indicators(d.labels);
    out.push_back({std::move(d), std::move(c), std::move(ind), k});
  }
  return out;
}

Outcome full_space_identity(const std::vector<Instance>& suite) {
  double worst = 0;
  for (const auto& s : suite) {
    const auto [k1, k2] = build_kernels(s.centered, s.ind);
    const auto sc = scatter_matrices(s.centered, s.ind);
    const double rhs = alignment_constant(s.ind) * sc.between.trace() / std::sqrt(trace_of_square(sc.total));
    worst = std::max(worst, std::abs(kernel_alignment(k1, k2) - rhs));
  }
  return {worst < 1e-10, "max |A - c Tr(Sb)/sqrt(Tr(St St))| = " + sci(worst)};
}

Outcome subspace_identity(const std::vector<Instance>& suite, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0;
  for (const auto& s : suite) {
    const Eigen::Index p = s.centered.rows();
    std::uniform_int_distribution<Eigen::Index> kdist(1, std::min<Eigen::Index>(s.num_classes - 1, p));
    const MatrixXd g = testing::random_orthonormal(rng, p, kdist(rng));
    const auto id = subspace_alignment_identity_check(s.centered, s.ind, g);
    worst = std::max(worst, std::abs(id.lhs - id.rhs));
  }
  return {worst < 1e-10, "max |A(G) - c J1(G)| = " + sci(worst)};
}

Outcome multi_identities(const std::vector<Instance>& suite, const std::vector<Instance>& single) {
  const Outcome full = full_space_identity(suite);
  const Outcome sub = subspace_identity(suite, 303);
  // unit weights: the multi-label path must reproduce the single-label quantities
  std::mt19937_64 rng(304);
  double reduction = 0;
  for (const auto& s : single) {
    const auto labels = s.data.labels.with_mode(LabelMode::multi);
    const auto [c, info] = center(s.data.x, labels);
    const auto ind = build_indicators(labels);
    const auto [m1, m2] = build_kernels(c, ind);
    const auto [s1, s2] = build_kernels(s.centered, s.ind);
    reduction = std::max(reduction, std::abs(kernel_alignment(m1, m2) - kernel_alignment(s1, s2)));
    reduction = std::max(reduction, std::abs(alignment_constant(ind) - alignment_constant(s.ind)));
    const auto sm = scatter_matrices(c, ind), ss = scatter_matrices(s.centered, s.ind);
    const MatrixXd g = testing::random_orthonormal(rng, c.rows(), 1);
    reduction = std::max(reduction, std::abs(objective_j1(g, sm) - objective_j1(g, ss)));
  }
  return {full.pass && sub.pass && reduction < 1e-12,
          full.detail + "; " + sub.detail + "; unit-weight reduction " + sci(reduction)};
}

Outcome lemma_equivalence(const std::vector<Instance>& single, const std::vector<Instance>& multi) {
  double worst = 0;
  for (const auto& s : single) {
    const auto def = scatter_single_def(s.centered, s.data.labels);
    const auto mat = scatter_single_matrix(s.centered, s.ind);
    worst = std::max({worst, rel_fro(mat.between, def.between), rel_fro(mat.total, def.total),
                      rel_fro(*mat.within, *def.within)});
  }
  for (const auto& s : multi) {
    const auto def = scatter_multi_def(s.centered, s.data.labels);
    const auto mat = scatter_multi_matrix(s.centered, s.ind);
    worst = std::max({worst, rel_fro(mat.between, def.between), rel_fro(mat.total, def.total)});
  }
  return {worst < 1e-10, "max relative Frobenius error " + sci(worst)};
}

Outcome gradient_check() {
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<int> pdist(2, 10), kdist(1, 3);
  double worst = 0;
  for (int t = 0; t < 50; ++t) {
    const int p = pdist(rng), k = std::min(kdist(rng), p);
    const auto d = t % 2 ? testing::random_multi(rng, p, 30, 4) : testing::random_single(rng, p, 30, 4);
    const auto [c, info] = center(d.x, d.labels);
    const auto s = scatter_matrices(c, build_indicators(d.labels));
    const MatrixXd g = testing::random_orthonormal(rng, p, k);
    const double h = 1e-6;
    MatrixXd fd(p, k);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < k; ++j) {
        MatrixXd a = g, b = g;
        a(i, j) += h;
        b(i, j) -= h;
        fd(i, j) = (objective_j1(a, s) - objective_j1(b, s)) / (2 * h);
      }
    const double err = (gradient_j1(g, s) - fd).cwiseAbs().maxCoeff() / fd.cwiseAbs().maxCoeff();
    worst = std::max(worst, err);
  }
  return {worst < 1e-5, "max relative error " + sci(worst) + " over 25 single + 25 multi"};
}

Outcome manifold_preservation() {
  double worst_fit = 0;
  int runs = 0;
  auto observe = [&](int, const MatrixXd& g) { worst_fit = std::max(worst_fit, orthonormality_error(g)); };
  for (std::uint64_t seed : {0, 1, 2}) {
    const auto d = testing::standard_instance(seed);
    for (double tau : {0.001, 0.005, 0.05}) {
      OptConfig cfg;
      cfg.tau = tau;
      fit_kalda(d.x, d.labels, 2, cfg, observe);
      ++runs;
    }
  }
  std::mt19937_64 rng(606);
  for (int t = 0; t < 10; ++t) {
    const auto d = testing::random_multi(rng, 8, 50, 4);
    fit_kalda(d.x, d.labels, 3, OptConfig{}, observe);
    ++runs;
  }
  double worst_reortho = 0;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    MatrixXd a(12, 1 + t % 5);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = normal(rng);
    worst_reortho = std::max(worst_reortho, orthonormality_error(reorthonormalize(a)));
  }
  return {worst_fit < 1e-8 && worst_reortho < 1e-12,
          std::to_string(runs) + " fits, worst ||G'G - I|| " + sci(worst_fit) +
              "; reorthonormalize worst " + sci(worst_reortho)};
}

Outcome convergence() {
  const auto d = testing::standard_instance(0);
  OptConfig cfg;
  cfg.tau = 0.001;
  const auto fit = fit_kalda(d.x, d.labels, 2, cfg);
  const auto& j = fit.trace.objective_values;
  double worst_drop = 0;
  for (std::size_t i = 1; i < j.size(); ++i) worst_drop = std::max(worst_drop, j[i - 1] - j[i]);
  return {fit.trace.converged && fit.trace.iterations_run <= 500 && worst_drop <= 1e-9,
          "converged=" + std::to_string(fit.trace.converged) + " after " +
              std::to_string(fit.trace.iterations_run) + " iterations, largest decrease " +
              sci(worst_drop)};
}

Outcome improvement(const std::vector<Instance>& single, const std::vector<Instance>& multi) {
  int checked = 0, worse = 0;
  for (const auto* suite : {&single, &multi}) {
    for (const auto& s : *suite) {
      const Eigen::Index k = std::min<Eigen::Index>(s.num_classes - 1, s.centered.rows());
      const auto sc = scatter_matrices(s.centered, s.ind);
      if (sc.between.norm() == 0) continue;
      const auto init = initial_projection(sc, k, 0);
      OptConfig cfg;
      cfg.tau = 0.001;
      const auto result = optimize_j1(sc, init.projection, cfg);
      ++checked;
      if (objective_j1(result.projection, sc) < result.trace.objective_values.front()) ++worse;
    }
  }
  const auto d = testing::standard_instance(0);
  OptConfig cfg;
  cfg.tau = 0.001;
  const auto fit = fit_kalda(d.x, d.labels, 2, cfg);
  const auto [c, info] = center(d.x, d.labels);
  const auto sc = scatter_matrices(c, build_indicators(d.labels));
  const double margin = objective_j1(fit.projection, sc) - fit.trace.objective_values.front();
  return {worse == 0 && fit.init == InitKind::classical_lda && margin > 1e-6,
          std::to_string(worse) + " of " + std::to_string(checked) +
              " random fits below init; Gaussian margin " + sci(margin)};
}

Outcome trace_ratio() {
  std::mt19937_64 rng(909);
  int bad = 0;
  for (int t = 0; t < 50; ++t) {
    const auto d = t % 2 ? testing::random_multi(rng, 7, 35, 4) : testing::random_single(rng, 7, 35, 4);
    const auto [c, info] = center(d.x, d.labels);
    const auto tr = fit_trace_ratio(scatter_matrices(c, build_indicators(d.labels)), 1 + t % 3);
    for (std::size_t i = 1; i < tr.history.size(); ++i)
      if (tr.history[i] < tr.history[i - 1]) ++bad;
  }
  ScatterSet<double> s{MatrixXd::Zero(2, 2), MatrixXd::Zero(2, 2), std::nullopt};
  s.between.diagonal() << 4, 0;
  s.total.diagonal() << 4, 1;
  const auto tr = fit_trace_ratio(s, 1, 1e-12);
  double best = -1, best_angle = 0;
  for (double a = 0; a < std::numbers::pi; a += 1e-4) {
    const Eigen::Vector2d v(std::cos(a), std::sin(a));
    const double r = v.dot(s.between * v) / v.dot(s.total * v);
    if (r > best) best = r, best_angle = a;
  }
  const Eigen::Vector2d oracle(std::cos(best_angle), std::sin(best_angle));
  const double cos_e1 = std::abs(tr.projection(0, 0));
  const double cos_oracle = std::abs(oracle.dot(tr.projection.col(0)));
  return {bad == 0 && std::abs(tr.ratio - 1) < 1e-8 && cos_e1 > 1 - 1e-6 && cos_oracle > 1 - 1e-6 &&
              tr.ratio >= best - 1e-12,
          std::to_string(bad) + " decreasing steps; closed instance lambda=" + sci(tr.ratio) +
              ", |cos(e1)|=" + std::to_string(cos_e1)};
}

Outcome classification() {
  const auto d = testing::gaussian_classes(20, 50, 3, 6.0, 0);
  const auto ka = cross_validate(d.x, d.labels, Method::kalda, 2, 5, 3, 0);
  const auto lda = cross_validate(d.x, d.labels, Method::lda, 2, 5, 3, 0);
  return {ka.mean.accuracy >= 0.95 && ka.mean.accuracy >= lda.mean.accuracy - 0.02,
          "kaLDA mean accuracy " + std::to_string(ka.mean.accuracy) + ", classical LDA " +
              std::to_string(lda.mean.accuracy)};
}

Outcome metrics() {
  PredictionSet pred{LabelMode::single, {{0}, {1}, {1}, {1}}};
  const auto s = score_single(pred, LabelAssignment::single({0, 0, 1, 1}, 2));
  const bool worked = std::abs(s.accuracy - 0.75) < 1e-12 && std::abs(s.macro_f1 - 11.0 / 15) < 1e-12 &&
                      std::abs(s.micro_f1 - 0.75) < 1e-12;
  std::mt19937_64 rng(1111);
  std::uniform_int_distribution<int> cls(0, 4);
  double worst = 0;
  for (int t = 0; t < 50; ++t) {
    std::vector<int> truth(40);
    PredictionSet p{LabelMode::single, {}};
    for (int i = 0; i < 40; ++i) {
      truth[static_cast<std::size_t>(i)] = i < 5 ? i : cls(rng);
      p.sets.push_back({cls(rng)});
    }
    const auto r = score_single(p, LabelAssignment::single(truth, 5));
    worst = std::max(worst, std::abs(r.micro_f1 - r.accuracy));
  }
  return {worked && worst < 1e-12, "worked example (" + std::to_string(s.accuracy) + ", " +
                                       std::to_string(s.macro_f1) + ", " + std::to_string(s.micro_f1) +
                                       "); max |microF1 - accuracy| " + sci(worst)};
}

Outcome determinism() {
  testing::TempDir dir("acceptance");
  const auto x = dir.file("x.csv"), y = dir.file("y.txt");
  testing::write_dataset(testing::gaussian_classes(10, 20, 3, 6.0, 12), x, y);
  std::ostringstream sink;
  int identical = 0, total = 0;
  auto twice = [&](std::vector<std::string> args, const std::string& flag) {
    std::string outputs[2];
    for (int r = 0; r < 2; ++r) {
      const auto path = dir.file("out" + std::to_string(total) + "-" + std::to_string(r));
      auto a = args;
      a.push_back(flag);
      a.push_back(path);
      if (cli::run(a, sink, sink) != cli::kOk) return;
      outputs[r] = testing::read_text(path);
    }
    ++total;
    if (!outputs[0].empty() && outputs[0] == outputs[1]) ++identical;
  };
  for (const char* m : {"kalda", "lda", "tr", "mmc"})
    twice({"fit", "--features", x, "--labels", y, "--method", m, "--seed", "3"}, "--model");
  twice({"crossval", "--features", x, "--labels", y, "--method", "kalda,lda,tr,mmc", "--seed", "3"},
        "--out");
  return {total == 5 && identical == 5,
          std::to_string(identical) + " of 5 command pairs byte-identical"};
}

}  // namespace

int main() {
  const auto single = random_suite(LabelMode::single, 100, 101);
  const auto multi = random_suite(LabelMode::multi, 100, 202);

  struct Criterion {
    const char* name;
    double budget_s;  // 0: no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"alignment identity, full space (single-label)", 5, [&] { return full_space_identity(single); }},
      {"alignment identity, projected subspace", 0, [&] { return subspace_identity(single, 102); }},
      {"multi-label identities and unit-weight reduction", 0, [&] { return multi_identities(multi, single); }},
      {"factored scatter forms match definitions", 0, [&] { return lemma_equivalence(single, multi); }},
      {"analytic gradient vs finite differences", 10, gradient_check},
      {"orthonormality preserved during fits", 0, manifold_preservation},
      {"convergence on the 3-class Gaussian instance", 2, convergence},
      {"improvement over the initialization", 0, [&] { return improvement(single, multi); }},
      {"trace-ratio monotonicity and closed instance", 0, trace_ratio},
      {"cross-validated classification sanity", 30, classification},
      {"metric correctness", 0, metrics},
      {"deterministic fit and crossval output", 0, determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && secs >= c.budget_s) {
      o.pass = false;
      o.detail += "; over the " + sci(c.budget_s) + " s budget";
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %02zu %s (%.3f s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, c.name, secs,
                o.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures),
              criteria.size());
  return failures == 0 ? 0 : 1;
}
