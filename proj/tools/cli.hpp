#pragma once

#include "kalda/common.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kalda::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kDataFailure = 3;

// Bad flag combination or value.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string features;
  std::string labels;
  std::string model;
  std::string out;
  std::vector<std::string> methods;
  std::optional<long> dim;
  std::string dim_range;
  double tau = 0.005;
  int max_iters = 1000;
  double rel_tol = 1e-8;
  int folds = 5;
  int knn = 3;
  std::uint64_t seed = 0;
  std::string mode = "auto";
};

// Parses argv and runs the selected command. Results go to the --out/--model
// files, or to `out` when no output path is given; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Commands, callable directly. They throw kalda::Error subclasses (or
// UsageError) on failure; run() maps those onto exit codes.
void cmd_fit(const RunConfig& cfg, std::ostream& out);
void cmd_transform(const RunConfig& cfg, std::ostream& out);
void cmd_crossval(const RunConfig& cfg, std::ostream& out);
void cmd_trace(const RunConfig& cfg, std::ostream& out);
void cmd_sweep(const RunConfig& cfg, std::ostream& out);

}  // namespace kalda::cli
