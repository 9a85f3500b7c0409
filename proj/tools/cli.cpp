#include "cli.hpp"

#include "kalda/dataset.hpp"
#include "kalda/eval.hpp"
#include "kalda/kalda.hpp"
#include "kalda/methods.hpp"
#include "kalda/model_io.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

namespace kalda::cli {
namespace {

struct Inputs {
  MatrixXd x;
  LabelAssignment labels;
};

LabelAssignment apply_mode(LabelAssignment labels, const std::string& mode) {
  if (mode == "auto") return labels;
  if (mode == "multi") return labels.with_mode(LabelMode::multi);
  if (mode == "single") {
    if (!labels.every_sample_single())
      throw UsageError("--mode single given but some samples carry several labels");
    return labels.with_mode(LabelMode::single);
  }
  throw UsageError("--mode must be auto, single or multi");
}

Inputs load_inputs(const RunConfig& cfg) {
  if (cfg.features.empty()) throw UsageError("--features is required");
  if (cfg.labels.empty()) throw UsageError("--labels is required");
  auto features = load_features(cfg.features);
  auto labels = apply_mode(load_labels(cfg.labels), cfg.mode);
  if (static_cast<std::size_t>(features.samples()) != labels.size())
    throw DimensionError("features have " + std::to_string(features.samples()) +
                         " samples, labels have " + std::to_string(labels.size()));
  return {features.values(), std::move(labels)};
}

OptConfig opt_config(const RunConfig& cfg) {
  OptConfig opt;
  opt.tau = cfg.tau;
  opt.max_iters = cfg.max_iters;
  opt.rel_tol = cfg.rel_tol;
  opt.seed = cfg.seed;
  try {
    opt.validate();
  } catch (const DimensionError& e) {
    throw UsageError(e.what());
  }
  return opt;
}

Eigen::Index subspace_dim(const RunConfig& cfg, const Inputs& in) {
  const long k = cfg.dim.value_or(static_cast<long>(in.labels.num_classes()) - 1);
  if (k < 1 || k > in.x.rows())
    throw UsageError("dimension " + std::to_string(k) + " outside [1, " +
                     std::to_string(in.x.rows()) + "]");
  return static_cast<Eigen::Index>(k);
}

std::vector<Method> methods_of(const RunConfig& cfg, std::vector<Method> fallback) {
  if (cfg.methods.empty()) return fallback;
  std::vector<Method> out;
  for (const auto& name : cfg.methods) {
    auto m = parse_method(name);
    if (!m) throw UsageError("unknown method '" + name + "' (expected kalda, lda, tr or mmc)");
    out.push_back(*m);
  }
  return out;
}

void check_cv_flags(const RunConfig& cfg) {
  if (cfg.folds < 2) throw UsageError("--folds must be at least 2");
  if (cfg.knn < 1) throw UsageError("--knn must be positive");
}

// Writes to --out when given, else to the fallback stream. Output is
// assembled in memory so a failed command leaves no partial file.
void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot write " + path, 0);
  file << text;
  if (!file) throw DataError("write failed for " + path, 0);
}

struct DimRange {
  long lo, hi, step;
};

DimRange parse_dim_range(const std::string& text) {
  DimRange r{};
  long* fields[] = {&r.lo, &r.hi, &r.step};
  std::size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t colon = text.find(':', start);
    if ((i < 2) == (colon == std::string::npos))
      throw UsageError("--dim-range must look like MIN:MAX:STEP");
    const std::string part = text.substr(start, i < 2 ? colon - start : std::string::npos);
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), *fields[i]);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size())
      throw UsageError("--dim-range has a non-integer field '" + part + "'");
    start = colon + 1;
  }
  if (r.step < 1) throw UsageError("--dim-range step must be positive");
  if (r.lo < 1 || r.hi < r.lo) throw UsageError("--dim-range needs 1 <= MIN <= MAX");
  return r;
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const UsageError*>(&e) || dynamic_cast<const DimensionError*>(&e) ||
      dynamic_cast<const Unsupported*>(&e))
    return kUsage;
  return kDataFailure;
}

}  // namespace

void cmd_fit(const RunConfig& cfg, std::ostream& out) {
  const auto methods = methods_of(cfg, {Method::kalda});
  if (methods.size() != 1) throw UsageError("fit takes exactly one --method");
  const Method method = methods.front();
  if (cfg.model.empty()) throw UsageError("fit requires --model (output path)");
  const OptConfig opt = opt_config(cfg);
  const Inputs in = load_inputs(cfg);
  const Eigen::Index k = subspace_dim(cfg, in);

  auto fitted = fit_subspace(in.x, in.labels, method, k, opt);
  ModelFile file;
  file.method = method;
  file.mode = in.labels.mode();
  file.mean = fitted.centering.mean;
  file.projection = fitted.projection;
  file.metadata.emplace_back("classes", std::to_string(in.labels.num_classes()));
  file.metadata.emplace_back("samples", std::to_string(in.labels.size()));
  if (fitted.trace) {
    file.metadata.emplace_back("tau", format_double(opt.tau));
    file.metadata.emplace_back("iterations", std::to_string(fitted.trace->iterations_run));
    file.metadata.emplace_back("converged", fitted.trace->converged ? "1" : "0");
  }
  if (fitted.objective) file.metadata.emplace_back("objective", format_double(*fitted.objective));

  std::ostringstream text;
  write_model(text, file);
  emit(cfg.model, text.str(), out);
}

void cmd_transform(const RunConfig& cfg, std::ostream& out) {
  if (cfg.model.empty()) throw UsageError("transform requires --model");
  if (cfg.features.empty()) throw UsageError("--features is required");
  const ModelFile file = load_model(cfg.model);
  const auto features = load_features(cfg.features);
  if (features.features() != file.features())
    throw DimensionError("features have " + std::to_string(features.features()) +
                         " columns, model expects " + std::to_string(file.features()));
  const MatrixXd projected = file.model().transform(features.values());

  std::ostringstream text;
  for (Eigen::Index j = 0; j < projected.rows(); ++j)
    text << (j ? "," : "") << "dim_" << (j + 1);
  text << '\n';
  for (Eigen::Index i = 0; i < projected.cols(); ++i) {
    for (Eigen::Index j = 0; j < projected.rows(); ++j)
      text << (j ? "," : "") << format_double(projected(j, i));
    text << '\n';
  }
  emit(cfg.out, text.str(), out);
}

void cmd_crossval(const RunConfig& cfg, std::ostream& out) {
  const auto methods = methods_of(cfg, {Method::kalda});
  check_cv_flags(cfg);
  const OptConfig opt = opt_config(cfg);
  const Inputs in = load_inputs(cfg);
  const Eigen::Index k = subspace_dim(cfg, in);
  for (Method m : methods)
    if (m == Method::mmc && in.labels.mode() == LabelMode::multi)
      throw Unsupported("mmc is not defined for multi-label data");

  std::ostringstream text;
  text << "method,fold,accuracy,macro_f1,micro_f1\n";
  for (Method m : methods) {
    const auto report = cross_validate(in.x, in.labels, m, k, static_cast<std::size_t>(cfg.folds),
                                       cfg.knn, cfg.seed, opt);
    for (std::size_t f = 0; f < report.folds.size(); ++f) {
      const auto& s = report.folds[f];
      text << to_string(m) << ',' << f << ',' << format_double(s.accuracy) << ','
           << format_double(s.macro_f1) << ',' << format_double(s.micro_f1) << '\n';
    }
    text << to_string(m) << ",mean," << format_double(report.mean.accuracy) << ','
         << format_double(report.mean.macro_f1) << ',' << format_double(report.mean.micro_f1)
         << '\n';
  }
  emit(cfg.out, text.str(), out);
}

void cmd_trace(const RunConfig& cfg, std::ostream& out) {
  const OptConfig opt = opt_config(cfg);
  const Inputs in = load_inputs(cfg);
  const Eigen::Index k = subspace_dim(cfg, in);
  const auto fit = fit_kalda(in.x, in.labels, k, opt);

  std::ostringstream text;
  text << "iteration,J1,eta\n";
  const auto& values = fit.trace.objective_values;
  for (std::size_t i = 0; i < values.size(); ++i) {
    text << i << ',' << format_double(values[i]) << ',';
    if (i > 0) text << format_double(fit.trace.step_sizes[i - 1]);
    text << '\n';
  }
  emit(cfg.out, text.str(), out);
}

void cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  if (cfg.dim_range.empty()) throw UsageError("sweep requires --dim-range MIN:MAX:STEP");
  const DimRange range = parse_dim_range(cfg.dim_range);
  const auto methods = methods_of(cfg, {Method::kalda, Method::tr});
  check_cv_flags(cfg);
  const OptConfig opt = opt_config(cfg);
  const Inputs in = load_inputs(cfg);
  if (range.hi > in.x.rows())
    throw UsageError("--dim-range maximum " + std::to_string(range.hi) + " exceeds p = " +
                     std::to_string(in.x.rows()));

  std::ostringstream text;
  text << "method,k,mean_accuracy\n";
  for (Method m : methods) {
    for (long k = range.lo; k <= range.hi; k += range.step) {
      const auto report = cross_validate(in.x, in.labels, m, static_cast<Eigen::Index>(k),
                                         static_cast<std::size_t>(cfg.folds), cfg.knn, cfg.seed,
                                         opt);
      text << to_string(m) << ',' << k << ',' << format_double(report.mean.accuracy) << '\n';
    }
  }
  emit(cfg.out, text.str(), out);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kernel-alignment LDA: fit, transform and evaluate linear subspaces"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub, bool labels) {
    sub->add_option("--features", cfg.features, "Feature CSV, one row per sample");
    if (labels) {
      sub->add_option("--labels", cfg.labels, "Label file, space-separated class ids per line");
      sub->add_option("--mode", cfg.mode, "Label mode: auto, single or multi")
          ->check(CLI::IsMember({"auto", "single", "multi"}));
    }
    sub->add_option("--out", cfg.out, "Output path (default: standard output)");
  };
  auto optimizer = [&](CLI::App* sub) {
    sub->add_option("--dim", cfg.dim, "Subspace dimension (default: K - 1)");
    sub->add_option("--tau", cfg.tau, "Step-size factor tau")->capture_default_str();
    sub->add_option("--max-iters", cfg.max_iters, "Iteration cap")->capture_default_str();
    sub->add_option("--rel-tol", cfg.rel_tol, "Relative objective change for convergence")
        ->capture_default_str();
    sub->add_option("--seed", cfg.seed, "Seed for folds and random fallbacks")
        ->capture_default_str();
  };
  auto methods = [&](CLI::App* sub) {
    sub->add_option("--method", cfg.methods, "Methods: kalda, lda, tr, mmc")->delimiter(',');
  };
  auto cv = [&](CLI::App* sub) {
    sub->add_option("--folds", cfg.folds, "Cross-validation folds")->capture_default_str();
    sub->add_option("--knn", cfg.knn, "Neighbours for the KNN classifier")->capture_default_str();
  };

  auto* fit = app.add_subcommand("fit", "Fit a projection and write a model file");
  common(fit, true);
  optimizer(fit);
  methods(fit);
  fit->add_option("--model", cfg.model, "Model file to write");

  auto* transform = app.add_subcommand("transform", "Project features with a saved model");
  common(transform, false);
  transform->add_option("--model", cfg.model, "Model file to read");

  auto* crossval = app.add_subcommand("crossval", "Cross-validated KNN accuracy per method");
  common(crossval, true);
  optimizer(crossval);
  methods(crossval);
  cv(crossval);

  auto* trace = app.add_subcommand("trace", "Per-iteration J1 and step size of a kaLDA fit");
  common(trace, true);
  optimizer(trace);

  auto* sweep = app.add_subcommand("sweep", "Mean CV accuracy over a range of dimensions");
  common(sweep, true);
  optimizer(sweep);
  methods(sweep);
  cv(sweep);
  sweep->add_option("--dim-range", cfg.dim_range, "MIN:MAX:STEP");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*fit) cmd_fit(cfg, out);
    else if (*transform) cmd_transform(cfg, out);
    else if (*crossval) cmd_crossval(cfg, out);
    else if (*trace) cmd_trace(cfg, out);
    else if (*sweep) cmd_sweep(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataFailure;
  }
  return kOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("kalda");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace kalda::cli
