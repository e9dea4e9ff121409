#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ubmat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: mismatched partitions, bad dimensions, out-of-range
/// parameters.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A statistical or numerical precondition does not hold (matrix not
/// positive definite, sample too small, approximation unavailable).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Which factor of a uniform-block matrix failed to be invertible.
enum class SingularFactor { within_block, delta, dense };

class SingularError : public Error {
 public:
  SingularError(SingularFactor factor, std::ptrdiff_t index, double pivot,
                const std::string& what)
      : Error(what), factor_(factor), index_(index), pivot_(pivot) {}

  SingularFactor factor() const noexcept { return factor_; }
  /// Offending block (within_block) or pivot row (delta, dense).
  std::ptrdiff_t index() const noexcept { return index_; }
  double pivot() const noexcept { return pivot_; }

 private:
  SingularFactor factor_;
  std::ptrdiff_t index_;
  double pivot_;
};

/// A dense matrix is not uniform-block for the requested partition.
class StructureError : public Error {
 public:
  StructureError(std::ptrdiff_t block_row, std::ptrdiff_t block_col,
                 double deviation, const std::string& what)
      : Error(what),
        block_row_(block_row),
        block_col_(block_col),
        deviation_(deviation) {}

  std::ptrdiff_t block_row() const noexcept { return block_row_; }
  std::ptrdiff_t block_col() const noexcept { return block_col_; }
  double deviation() const noexcept { return deviation_; }

 private:
  std::ptrdiff_t block_row_;
  std::ptrdiff_t block_col_;
  double deviation_;
};

/// Text input could not be parsed. Line and column are 1-based; zero means
/// unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error(what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace ubmat
