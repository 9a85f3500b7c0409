#include "kalda/model_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

namespace kalda {
namespace {

constexpr std::string_view kMagic = "kalda-model";
constexpr int kVersion = 1;

[[noreturn]] void bad_model(const std::string& what, std::size_t line) {
  throw DataError("model file: " + what, line);
}

std::vector<double> parse_row(const std::string& text, std::size_t line) {
  std::vector<double> values;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const std::string_view cell = std::string_view(text).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
      bad_model("invalid number '" + std::string(cell) + "'", line);
    values.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return values;
}

Eigen::Index parse_count(const std::string& value, std::size_t line) {
  long long n = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
  if (ec != std::errc() || ptr != value.data() + value.size() || n < 1)
    bad_model("invalid count '" + value + "'", line);
  return static_cast<Eigen::Index>(n);
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_model(std::ostream& out, const ModelFile& model) {
  detail::require_dims(model.mean.size() == model.projection.rows(),
                       "model: mean length does not match projection rows");
  out << kMagic << ' ' << kVersion << '\n';
  out << "method " << to_string(model.method) << '\n';
  out << "mode " << to_string(model.mode) << '\n';
  out << "p " << model.projection.rows() << '\n';
  out << "k " << model.projection.cols() << '\n';
  for (const auto& [key, value] : model.metadata) out << key << ' ' << value << '\n';
  out << "mean\n";
  for (Eigen::Index i = 0; i < model.mean.size(); ++i)
    out << (i ? "," : "") << format_double(model.mean(i));
  out << "\nprojection\n";
  for (Eigen::Index i = 0; i < model.projection.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.projection.cols(); ++j)
      out << (j ? "," : "") << format_double(model.projection(i, j));
    out << '\n';
  }
}

void save_model(const std::string& path, const ModelFile& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path, 0);
  write_model(out, model);
  if (!out) throw DataError("write failed for " + path, 0);
}

ModelFile read_model(std::istream& in) {
  ModelFile model;
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next_line() || line != std::string(kMagic) + " " + std::to_string(kVersion))
    bad_model("missing or unsupported header", 1);

  bool have_method = false, have_mode = false;
  Eigen::Index p = 0, k = 0;
  while (true) {
    if (!next_line()) bad_model("unexpected end of file before 'mean'", line_no);
    if (line == "mean") break;
    const auto space = line.find(' ');
    if (space == std::string::npos) bad_model("malformed header line '" + line + "'", line_no);
    const std::string key = line.substr(0, space);
    const std::string value = line.substr(space + 1);
    if (key == "method") {
      auto m = parse_method(value);
      if (!m) bad_model("unknown method '" + value + "'", line_no);
      model.method = *m;
      have_method = true;
    } else if (key == "mode") {
      if (value == "single") model.mode = LabelMode::single;
      else if (value == "multi") model.mode = LabelMode::multi;
      else bad_model("unknown mode '" + value + "'", line_no);
      have_mode = true;
    } else if (key == "p") {
      p = parse_count(value, line_no);
    } else if (key == "k") {
      k = parse_count(value, line_no);
    } else {
      model.metadata.emplace_back(key, value);
    }
  }
  if (!have_method || !have_mode || p == 0 || k == 0)
    bad_model("header must define method, mode, p and k", line_no);
  if (k > p) bad_model("k exceeds p", line_no);

  if (!next_line()) bad_model("missing mean vector", line_no);
  const auto mean = parse_row(line, line_no);
  if (static_cast<Eigen::Index>(mean.size()) != p)
    bad_model("mean has " + std::to_string(mean.size()) + " values, expected " + std::to_string(p),
              line_no);
  model.mean = Eigen::Map<const VectorXd>(mean.data(), p);

  if (!next_line() || line != "projection") bad_model("expected 'projection'", line_no);
  model.projection.resize(p, k);
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!next_line()) bad_model("projection has too few rows", line_no);
    const auto row = parse_row(line, line_no);
    if (static_cast<Eigen::Index>(row.size()) != k)
      bad_model("projection row has " + std::to_string(row.size()) + " values, expected " +
                    std::to_string(k),
                line_no);
    for (Eigen::Index j = 0; j < k; ++j) model.projection(i, j) = row[static_cast<std::size_t>(j)];
  }
  while (next_line())
    if (!line.empty()) bad_model("trailing content", line_no);
  return model;
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path, 0);
  return read_model(in);
}

}  // namespace kalda
