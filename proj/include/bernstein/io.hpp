#pragma once

// CSV / svmlight readers and a small CSV writer with fixed 17-digit output.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bernstein/data.hpp"
#include "bernstein/errors.hpp"

namespace bernstein {

/// Shortest form is not required; 17 significant digits round-trip a double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

enum class TableFormat { csv, svmlight };

inline TableFormat parse_table_format(std::string_view s) {
  if (s == "csv") return TableFormat::csv;
  if (s == "svmlight" || s == "libsvm") return TableFormat::svmlight;
  throw InvalidParameter("unknown table format '" + std::string(s) + "'");
}

/// How to interpret the label column.
enum class LabelHint { automatic, continuous, binary };

struct LoadedTable {
  Dataset data;
  std::vector<std::string> columns;  // feature names when a header was present
  std::vector<std::string> notices;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline bool parse_number(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(cell.c_str(), &end);
  return end == cell.c_str() + cell.size() && errno != ERANGE;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

inline std::string where(const std::string& path, long line) {
  return path + ":" + std::to_string(line) + ": ";
}

// Binary if every label is in {-1, 1} or {0, 1}; {0, 1} is remapped.
inline void settle_labels(LoadedTable& t, LabelHint hint) {
  std::set<double> values(t.data.y.data(), t.data.y.data() + t.data.y.size());
  const bool pm = std::all_of(values.begin(), values.end(), [](double v) { return v == 1.0 || v == -1.0; });
  const bool zo = std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0 || v == 1.0; });
  bool binary = hint == LabelHint::binary || (hint == LabelHint::automatic && (pm || zo) && !values.empty());
  if (hint == LabelHint::continuous) binary = false;
  if (!binary) {
    t.data.label_kind = LabelKind::continuous;
    return;
  }
  if (!pm && !zo) throw DataError("binary labels must be in {-1, +1} or {0, 1}");
  t.data.label_kind = LabelKind::binary;
  if (!pm && zo) {
    for (Eigen::Index i = 0; i < t.data.y.size(); ++i) t.data.y[i] = t.data.y[i] == 0.0 ? -1.0 : 1.0;
    t.notices.push_back("labels {0, 1} remapped to {-1, +1}");
  }
}

}  // namespace detail

/// CSV: label in the first column, features after it, optional header row
/// (detected by a non-numeric first row), '#' comment lines skipped.
inline LoadedTable load_csv(const std::string& path, LabelHint hint = LabelHint::automatic) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  LoadedTable t;
  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  std::size_t width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = detail::trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto cells = detail::split_csv(s);
    if (first) {
      first = false;
      width = cells.size();
      if (width < 2) throw DataError(detail::where(path, lineno) + "need a label and at least one feature");
      double tmp;
      bool numeric = true;
      for (const auto& c : cells) numeric &= detail::parse_number(c, tmp);
      if (!numeric) {
        t.columns.assign(cells.begin() + 1, cells.end());
        continue;
      }
    }
    if (cells.size() != width) {
      throw DataError(detail::where(path, lineno) + "expected " + std::to_string(width) +
                      " fields, found " + std::to_string(cells.size()));
    }
    std::vector<double> row(width);
    for (std::size_t k = 0; k < width; ++k) {
      if (!detail::parse_number(cells[k], row[k])) {
        throw DataError(detail::where(path, lineno) + "non-numeric value '" + cells[k] +
                        "' in field " + std::to_string(k + 1));
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("'" + path + "' has no data rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(width - 1);
  t.data.X.resize(n, p);
  t.data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    t.data.y[i] = r[0];
    for (Eigen::Index j = 0; j < p; ++j) t.data.X(i, j) = r[static_cast<std::size_t>(j + 1)];
  }
  detail::settle_labels(t, hint);
  return t;
}

/// svmlight: `label idx:value ...` with 1-based indices, densified. The width
/// is the largest index seen, or n_features when given (larger indices are
/// then an error).
inline LoadedTable load_svmlight(const std::string& path, LabelHint hint = LabelHint::automatic,
                                 long n_features = 0) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  LoadedTable t;
  std::vector<double> labels;
  std::vector<std::vector<std::pair<long, double>>> rows;
  std::string line;
  long lineno = 0;
  long max_index = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string s = detail::trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (s.empty()) continue;
    std::istringstream tok(s);
    std::string item;
    tok >> item;
    double label;
    if (!detail::parse_number(item, label)) {
      throw DataError(detail::where(path, lineno) + "bad label '" + item + "'");
    }
    std::vector<std::pair<long, double>> entries;
    long last = 0;
    while (tok >> item) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) {
        throw DataError(detail::where(path, lineno) + "expected index:value, got '" + item + "'");
      }
      double idx_d, value;
      if (!detail::parse_number(item.substr(0, colon), idx_d) || idx_d != std::floor(idx_d) ||
          !detail::parse_number(item.substr(colon + 1), value)) {
        throw DataError(detail::where(path, lineno) + "malformed pair '" + item + "'");
      }
      const long idx = static_cast<long>(idx_d);
      if (idx < 1 || (n_features > 0 && idx > n_features)) {
        throw DataError(detail::where(path, lineno) + "feature index " + std::to_string(idx) +
                        " out of range");
      }
      if (idx <= last) {
        throw DataError(detail::where(path, lineno) + "feature indices must increase");
      }
      last = idx;
      max_index = std::max(max_index, idx);
      entries.emplace_back(idx, value);
    }
    labels.push_back(label);
    rows.push_back(std::move(entries));
  }
  if (rows.empty()) throw DataError("'" + path + "' has no data rows");
  const long p = n_features > 0 ? n_features : max_index;
  if (p < 1) throw DataError("'" + path + "' has no features");
  t.data.X = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), p);
  t.data.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    t.data.y[ii] = labels[i];
    for (const auto& [idx, v] : rows[i]) t.data.X(ii, idx - 1) = v;
  }
  detail::settle_labels(t, hint);
  return t;
}

inline LoadedTable load_table(const std::string& path, TableFormat format,
                              LabelHint hint = LabelHint::automatic, long n_features = 0) {
  return format == TableFormat::csv ? load_csv(path, hint) : load_svmlight(path, hint, n_features);
}

/// Writes comma-separated rows. Opening fails with DataError when the parent
/// directory does not exist.
class CsvWriter {
public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : path_(path), out_(path) {
    if (!out_) throw DataError("cannot write '" + path + "'");
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out_ << ',';
      out_ << cells[k];
    }
    out_ << '\n';
    if (!out_) throw DataError("write to '" + path_ + "' failed");
  }

  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_double(v));
    row(cells);
  }

private:
  std::string path_;
  std::ofstream out_;
};

/// Label in the first column, then x1..xp.
inline void write_dataset_csv(const std::string& path, const Dataset& d) {
  std::vector<std::string> header{"y"};
  for (Eigen::Index j = 0; j < d.p(); ++j) header.push_back("x" + std::to_string(j + 1));
  CsvWriter w(path, header);
  std::vector<double> row(static_cast<std::size_t>(d.p() + 1));
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    row[0] = d.y[i];
    for (Eigen::Index j = 0; j < d.p(); ++j) row[static_cast<std::size_t>(j + 1)] = d.X(i, j);
    w.row(row);
  }
}

}  // namespace bernstein
