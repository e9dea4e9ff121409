#pragma once

#include "ubmat/dense_matrix.hpp"
#include "ubmat/estimation.hpp"
#include "ubmat/ub_matrix.hpp"

#include <json.hpp>

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace ubmat::io {

using Json = nlohmann::ordered_json;

std::string read_text(const std::string& path);

/// Writes `content` to a temporary file next to `path` and renames it into
/// place, so a failed run never leaves a partial file.
void write_text_atomic(const std::string& path, const std::string& content);

/// Parses JSON text; syntax errors become ParseError with 1-based line and
/// column.
Json parse_json(const std::string& text);

/// Rounds to 15 significant digits, the precision written to coordinate JSON.
double round15(double v);

/// {"partition": [...], "a": [...], "b": [[...], ...]}; b is full square and
/// must be symmetric within tol.symmetry.
UBMatrix coordinates_from_json(const Json& j, const Tolerances& tol = {});
Json coordinates_to_json(const UBMatrix& x);
UBMatrix read_coordinates(const std::string& path, const Tolerances& tol = {});

/// One matrix row per line, comma separated, no header.
DenseMatrix parse_dense_csv(const std::string& text);
std::string dense_to_csv(const DenseMatrix& m);
DenseMatrix read_dense_csv(const std::string& path);

Eigen::VectorXd parse_vector(const std::string& text);

struct DatasetCsvOptions {
  bool header = false;
  /// Column holding group labels: a header name, or a 1-based index.
  std::optional<std::string> label_column;
  /// Separate file with one label per line.
  std::optional<std::string> labels_path;
};

Dataset parse_dataset_csv(const std::string& text, const Partition& partition,
                          const DatasetCsvOptions& options = {},
                          const std::optional<std::string>& labels_text = std::nullopt);
Dataset read_dataset(const std::string& path, const Partition& partition,
                     const DatasetCsvOptions& options = {});
std::string dataset_to_csv(const Dataset& d, bool with_labels);

}  // namespace ubmat::io
