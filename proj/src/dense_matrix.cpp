#include "ubmat/dense_matrix.hpp"

#include "ubmat/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ubmat {

DenseMatrix::DenseMatrix(std::ptrdiff_t rows, std::ptrdiff_t cols, double fill)
    : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw InvalidInput("negative matrix dimension");
  data_.assign(static_cast<std::size_t>(rows * cols), fill);
}

DenseMatrix::DenseMatrix(std::ptrdiff_t rows, std::ptrdiff_t cols,
                         std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows < 0 || cols < 0 ||
      data_.size() != static_cast<std::size_t>(rows * cols)) {
    throw InvalidInput("matrix entry count does not match " +
                       std::to_string(rows) + "x" + std::to_string(cols));
  }
}

DenseMatrix DenseMatrix::identity(std::ptrdiff_t n) {
  DenseMatrix m(n, n);
  for (std::ptrdiff_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_eigen(const Eigen::MatrixXd& m) {
  DenseMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

Eigen::MatrixXd DenseMatrix::to_eigen() const {
  Eigen::MatrixXd m(rows_, cols_);
  for (std::ptrdiff_t i = 0; i < rows_; ++i)
    for (std::ptrdiff_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

double DenseMatrix::asymmetry() const {
  if (!square()) throw InvalidInput("asymmetry of a non-square matrix");
  double worst = 0.0;
  for (std::ptrdiff_t i = 0; i < rows_; ++i)
    for (std::ptrdiff_t j = i + 1; j < cols_; ++j)
      worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
  return worst;
}

double max_abs_diff(const DenseMatrix& x, const DenseMatrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw InvalidInput("max_abs_diff: shape mismatch");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < x.entries().size(); ++i)
    worst = std::max(worst, std::abs(x.entries()[i] - y.entries()[i]));
  return worst;
}

}  // namespace ubmat
