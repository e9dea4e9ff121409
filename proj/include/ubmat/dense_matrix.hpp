#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace ubmat {

/// Plain row-major real matrix. Used at I/O boundaries and by the dense
/// oracle; the coordinate algebra never stores one.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::ptrdiff_t rows, std::ptrdiff_t cols, double fill = 0.0);
  DenseMatrix(std::ptrdiff_t rows, std::ptrdiff_t cols,
              std::vector<double> entries);

  static DenseMatrix identity(std::ptrdiff_t n);
  static DenseMatrix from_eigen(const Eigen::MatrixXd& m);

  std::ptrdiff_t rows() const noexcept { return rows_; }
  std::ptrdiff_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::ptrdiff_t i, std::ptrdiff_t j) {
    return data_[static_cast<std::size_t>(i * cols_ + j)];
  }
  double operator()(std::ptrdiff_t i, std::ptrdiff_t j) const {
    return data_[static_cast<std::size_t>(i * cols_ + j)];
  }

  const std::vector<double>& entries() const noexcept { return data_; }

  Eigen::MatrixXd to_eigen() const;

  /// Largest |m_ij - m_ji|; throws unless square.
  double asymmetry() const;

  friend bool operator==(const DenseMatrix& x, const DenseMatrix& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.data_ == y.data_;
  }

 private:
  std::ptrdiff_t rows_ = 0;
  std::ptrdiff_t cols_ = 0;
  std::vector<double> data_;
};

/// max |x_ij - y_ij|; throws on shape mismatch.
double max_abs_diff(const DenseMatrix& x, const DenseMatrix& y);

}  // namespace ubmat
