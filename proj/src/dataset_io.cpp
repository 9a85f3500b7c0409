#include "kalda/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

namespace kalda {
namespace {

// Splits a stream into lines. A single trailing newline does not produce an
// extra empty line; a trailing '\r' on each line is dropped.
std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

bool parse_double(std::string_view cell, double& value) {
  if (cell.empty()) return false;
  const char* first = cell.data();
  const char* last = first + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
  return ec == std::errc() && ptr == last;
}

bool parse_class_id(std::string_view token, int& value) {
  if (token.empty()) return false;
  for (char c : token)
    if (c < '0' || c > '9') return false;
  const char* first = token.data();
  const char* last = first + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

std::ifstream open_or_throw(const std::string& path, bool labels) {
  std::ifstream in(path);
  if (!in) {
    const std::string what = "cannot open " + path;
    if (labels) throw LabelError(what);
    throw DataError(what, 0);
  }
  return in;
}

}  // namespace

DataMatrix<double> parse_features(std::istream& in) {
  const auto lines = read_lines(in);
  std::vector<std::vector<double>> rows;
  rows.reserve(lines.size());

  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    std::string_view line = lines[li];
    if (line.empty()) throw DataError("empty row", line_no);

    std::vector<double> row;
    std::size_t column = 1;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string_view cell =
          line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                             : comma - start);
      double value = 0.0;
      if (!parse_double(cell, value))
        throw DataError("non-numeric cell '" + std::string(cell) + "'", line_no, column);
      if (!std::isfinite(value)) throw DataError("non-finite value", line_no, column);
      row.push_back(value);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
      ++column;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw DataError("ragged row: expected " + std::to_string(rows.front().size()) +
                          " values, found " + std::to_string(row.size()),
                      line_no);
    rows.push_back(std::move(row));
  }

  if (rows.size() < 2) throw DataError("at least two samples are required", 0);

  const auto p = static_cast<Eigen::Index>(rows.front().size());
  const auto n = static_cast<Eigen::Index>(rows.size());
  MatrixXd x(p, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index f = 0; f < p; ++f)
      x(f, j) = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(f)];
  return DataMatrix<double>(std::move(x));
}

DataMatrix<double> load_features(const std::string& path) {
  auto in = open_or_throw(path, false);
  return parse_features(in);
}

LabelAssignment parse_labels(std::istream& in, std::optional<int> num_classes) {
  const auto lines = read_lines(in);
  if (lines.empty()) throw LabelError("label file has no samples");

  std::vector<std::vector<int>> sets;
  sets.reserve(lines.size());
  int max_id = -1;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    std::string_view line = lines[li];
    std::vector<int> set;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t space = line.find(' ', start);
      if (space == std::string_view::npos) space = line.size();
      const std::string_view token = line.substr(start, space - start);
      if (!token.empty()) {
        int id = 0;
        if (!parse_class_id(token, id))
          throw LabelError("invalid class id '" + std::string(token) + "'", line_no);
        if (num_classes && id >= *num_classes)
          throw LabelError("class id " + std::to_string(id) + " exceeds class count " +
                               std::to_string(*num_classes),
                           line_no);
        max_id = std::max(max_id, id);
        set.push_back(id);
      }
      start = space + 1;
    }
    if (set.empty()) throw LabelError("empty labels", line_no);
    sets.push_back(std::move(set));
  }

  const bool single = std::all_of(sets.begin(), sets.end(),
                                  [](const auto& s) { return s.size() == 1; });
  LabelAssignment labels(std::move(sets), num_classes.value_or(max_id + 1),
                         single ? LabelMode::single : LabelMode::multi);
  labels.require_all_classes_present();
  return labels;
}

LabelAssignment load_labels(const std::string& path, std::optional<int> num_classes) {
  auto in = open_or_throw(path, true);
  return parse_labels(in, num_classes);
}

}  // namespace kalda
