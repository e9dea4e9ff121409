#include "ubmat/io.hpp"

#include "ubmat/errors.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace ubmat::io {

namespace {

struct Cell {
  std::string text;
  std::size_t column;
};

// Splits one CSV line on commas, recording the 1-based column of each cell.
std::vector<Cell> split_line(const std::string& line) {
  std::vector<Cell> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    const std::size_t end = comma == std::string::npos ? line.size() : comma;
    cells.push_back({line.substr(start, end - start), start + 1});
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const Cell& cell, std::size_t line) {
  const std::string t = trim(cell.text);
  if (t.empty()) throw ParseError(line, cell.column, "empty field");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
    throw ParseError(line, cell.column, "not a finite number: '" + t + "'");
  }
  return v;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

bool blank(const std::string& line) { return trim(line).empty(); }

std::string format17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string describe(const std::string& what, std::size_t line, std::size_t col) {
  return what + " at line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::system_error(errno, std::generic_category(), "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(static_cast<long long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::system_error(errno, std::generic_category(), "cannot write " + path);
    }
    out << content;
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw std::system_error(EIO, std::generic_category(), "cannot write " + path);
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw std::system_error(ec, "cannot rename into " + path);
  }
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t limit = std::min(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(line, col, describe("invalid JSON", line, col));
  }
}

double round15(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return std::strtod(buf, nullptr);
}

UBMatrix coordinates_from_json(const Json& j, const Tolerances& tol) {
  try {
    if (!j.is_object()) throw InvalidInput("coordinates must be a JSON object");
    for (const char* key : {"partition", "a", "b"}) {
      if (!j.contains(key)) {
        throw InvalidInput(std::string("coordinates are missing \"") + key + "\"");
      }
    }
    std::vector<Index> sizes;
    for (const auto& v : j.at("partition")) {
      if (!v.is_number_integer()) throw InvalidInput("partition sizes must be integers");
      sizes.push_back(v.get<Index>());
    }
    Partition partition(sizes);
    const Index k = partition.blocks();
    const auto& ja = j.at("a");
    const auto& jb = j.at("b");
    if (!ja.is_array() || static_cast<Index>(ja.size()) != k) {
      throw InvalidInput("\"a\" must hold K = " + std::to_string(k) + " numbers");
    }
    if (!jb.is_array() || static_cast<Index>(jb.size()) != k) {
      throw InvalidInput("\"b\" must hold K = " + std::to_string(k) + " rows");
    }
    Eigen::VectorXd a(k);
    Eigen::MatrixXd b(k, k);
    for (Index r = 0; r < k; ++r) {
      a(r) = ja.at(static_cast<std::size_t>(r)).get<double>();
      const auto& row = jb.at(static_cast<std::size_t>(r));
      if (!row.is_array() || static_cast<Index>(row.size()) != k) {
        throw InvalidInput("\"b\" row " + std::to_string(r + 1) + " must hold " +
                           std::to_string(k) + " numbers");
      }
      for (Index c = 0; c < k; ++c) b(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return UBMatrix(std::move(a), std::move(b), std::move(partition), tol);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed coordinates: ") + e.what());
  }
}

Json coordinates_to_json(const UBMatrix& x) {
  Json j;
  j["partition"] = x.partition().sizes();
  Json a = Json::array();
  for (Index k = 0; k < x.blocks(); ++k) a.push_back(round15(x.a()(k)));
  Json b = Json::array();
  for (Index r = 0; r < x.blocks(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < x.blocks(); ++c) row.push_back(round15(x.b()(r, c)));
    b.push_back(row);
  }
  j["a"] = a;
  j["b"] = b;
  return j;
}

UBMatrix read_coordinates(const std::string& path, const Tolerances& tol) {
  return coordinates_from_json(parse_json(read_text(path)), tol);
}

DenseMatrix parse_dense_csv(const std::string& text) {
  std::vector<double> entries;
  Index cols = -1;
  Index rows = 0;
  const auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    const auto cells = split_line(lines[i]);
    if (cols >= 0 && static_cast<Index>(cells.size()) != cols) {
      throw ParseError(i + 1, 1,
                       describe("expected " + std::to_string(cols) + " fields, found " +
                                    std::to_string(cells.size()),
                                i + 1, 1));
    }
    cols = static_cast<Index>(cells.size());
    for (const Cell& c : cells) {
      try {
        entries.push_back(parse_number(c, i + 1));
      } catch (const ParseError& e) {
        throw ParseError(e.line(), e.column(), describe(e.what(), e.line(), e.column()));
      }
    }
    ++rows;
  }
  if (rows == 0) throw ParseError(0, 0, "matrix CSV is empty");
  return DenseMatrix(rows, cols, std::move(entries));
}

std::string dense_to_csv(const DenseMatrix& m) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format17(m(i, j));
    }
    out += '\n';
  }
  return out;
}

DenseMatrix read_dense_csv(const std::string& path) {
  return parse_dense_csv(read_text(path));
}

Eigen::VectorXd parse_vector(const std::string& text) {
  const auto cells = split_line(text);
  Eigen::VectorXd v(static_cast<Index>(cells.size()));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    try {
      v(static_cast<Index>(i)) = parse_number(cells[i], 1);
    } catch (const ParseError& e) {
      throw ParseError(1, e.column(), describe(e.what(), 1, e.column()));
    }
  }
  return v;
}

Dataset parse_dataset_csv(const std::string& text, const Partition& partition,
                          const DatasetCsvOptions& options,
                          const std::optional<std::string>& labels_text) {
  const auto lines = lines_of(text);
  std::size_t first = 0;
  while (first < lines.size() && blank(lines[first])) ++first;
  std::optional<std::size_t> label_index;
  if (options.header) {
    if (first == lines.size()) throw ParseError(0, 0, "dataset CSV is empty");
    const auto names = split_line(lines[first]);
    if (options.label_column) {
      for (std::size_t c = 0; c < names.size(); ++c)
        if (trim(names[c].text) == *options.label_column) label_index = c;
    }
    ++first;
  }
  if (options.label_column && !label_index) {
    char* end = nullptr;
    const long idx = std::strtol(options.label_column->c_str(), &end, 10);
    if (*end != '\0' || idx < 1) {
      throw InvalidInput("label column '" + *options.label_column + "' not found");
    }
    label_index = static_cast<std::size_t>(idx - 1);
  }

  const std::size_t expected =
      static_cast<std::size_t>(partition.dim()) + (label_index ? 1 : 0);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = first; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    const auto cells = split_line(lines[i]);
    if (cells.size() != expected) {
      throw ParseError(i + 1, 1,
                       describe("expected " + std::to_string(expected) +
                                    " fields, found " + std::to_string(cells.size()),
                                i + 1, 1));
    }
    std::vector<double> row;
    row.reserve(static_cast<std::size_t>(partition.dim()));
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      try {
        v = parse_number(cells[c], i + 1);
      } catch (const ParseError& e) {
        throw ParseError(e.line(), e.column(), describe(e.what(), e.line(), e.column()));
      }
      if (label_index && c == *label_index) {
        if (v != std::floor(v) || v < 1) {
          throw ParseError(i + 1, cells[c].column,
                           describe("group label must be an integer >= 1", i + 1,
                                    cells[c].column));
        }
        labels.push_back(static_cast<int>(v));
      } else {
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }
  if (labels_text) {
    if (label_index) throw InvalidInput("give either a label column or a labels file");
    const auto label_lines = lines_of(*labels_text);
    for (std::size_t i = 0; i < label_lines.size(); ++i) {
      if (blank(label_lines[i])) continue;
      const Cell cell{trim(label_lines[i]), 1};
      double v = 0.0;
      try {
        v = parse_number(cell, i + 1);
      } catch (const ParseError& e) {
        throw ParseError(e.line(), e.column(), describe(e.what(), e.line(), e.column()));
      }
      if (v != std::floor(v) || v < 1) {
        throw ParseError(i + 1, 1, describe("group label must be an integer >= 1", i + 1, 1));
      }
      labels.push_back(static_cast<int>(v));
    }
  }

  Eigen::MatrixXd x(static_cast<Index>(rows.size()), partition.dim());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (Index c = 0; c < partition.dim(); ++c)
      x(static_cast<Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
  if (label_index || labels_text) return Dataset(std::move(x), partition, std::move(labels));
  return Dataset(std::move(x), partition);
}

Dataset read_dataset(const std::string& path, const Partition& partition,
                     const DatasetCsvOptions& options) {
  std::optional<std::string> labels_text;
  if (options.labels_path) labels_text = read_text(*options.labels_path);
  return parse_dataset_csv(read_text(path), partition, options, labels_text);
}

std::string dataset_to_csv(const Dataset& d, bool with_labels) {
  std::string out;
  const Eigen::MatrixXd& x = d.observations();
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      if (j > 0) out += ',';
      out += format17(x(i, j));
    }
    if (with_labels && d.grouped()) {
      out += ',' + std::to_string(d.labels()[static_cast<std::size_t>(i)]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace ubmat::io
