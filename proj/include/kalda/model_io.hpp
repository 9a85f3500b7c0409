#pragma once

#include "kalda/common.hpp"
#include "kalda/methods.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace kalda {

/// On-disk subspace model.
///
/// Text format, version 1:
///
///     kalda-model 1
///     method <kalda|lda|tr|mmc>
///     mode <single|multi>
///     p <features>
///     k <dimension>
///     <key> <value>            (zero or more metadata lines)
///     mean
///     <p comma-separated values>
///     projection
///     <p lines of k comma-separated values>
///
/// Floats carry 17 significant digits so a save/load round trip is exact.
struct ModelFile {
  Method method = Method::kalda;
  LabelMode mode = LabelMode::single;
  VectorXd mean;
  MatrixXd projection;
  std::vector<std::pair<std::string, std::string>> metadata;

  Eigen::Index features() const { return projection.rows(); }
  Eigen::Index dim() const { return projection.cols(); }

  SubspaceModel<double> model() const {
    return {projection, CenteringInfo<double>{mean, mode}, std::nullopt, std::nullopt};
  }
};

// "%.17g"
std::string format_double(double value);

void write_model(std::ostream& out, const ModelFile& model);
void save_model(const std::string& path, const ModelFile& model);

ModelFile read_model(std::istream& in);
ModelFile load_model(const std::string& path);

}  // namespace kalda
