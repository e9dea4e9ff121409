#pragma once

// Textbook dense linear algebra used only to cross-check the coordinate
// algebra. Nothing here calls into ub_matrix.hpp; keep it that way.

#include "ubmat/dense_matrix.hpp"

#include <optional>
#include <vector>

namespace ubmat::oracle {

DenseMatrix matmul(const DenseMatrix& x, const DenseMatrix& y);
DenseMatrix add(const DenseMatrix& x, const DenseMatrix& y);
DenseMatrix subtract(const DenseMatrix& x, const DenseMatrix& y);
DenseMatrix transpose(const DenseMatrix& x);
std::vector<double> matvec(const DenseMatrix& x, const std::vector<double>& v);

struct LuDecomposition {
  DenseMatrix lower;  // unit diagonal
  DenseMatrix upper;
  std::vector<std::ptrdiff_t> permutation;  // row i of P x is row perm[i] of x
  int sign;                                 // parity of the permutation
};

/// Partial-pivoting LU. Throws SingularError when a pivot drops below
/// 1e-12 * max |x_ij|.
LuDecomposition lu(const DenseMatrix& x);

/// P x where P is the permutation of an LU decomposition.
DenseMatrix permute_rows(const DenseMatrix& x,
                         const std::vector<std::ptrdiff_t>& permutation);

/// 0 for a matrix that lu() rejects as singular.
double determinant(const DenseMatrix& x);

DenseMatrix inverse(const DenseMatrix& x);

struct SymmetricEigen {
  std::vector<double> values;  // decreasing
  DenseMatrix vectors;         // column j pairs with values[j]
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius mass falls below
/// 1e-12 (relative to the Frobenius norm of x). Throws InvalidInput when x is
/// not symmetric within 1e-10.
SymmetricEigen symmetric_eigen(const DenseMatrix& x);

/// Lower-triangular L with L L^T = x, or nullopt when a pivot is <= 1e-12.
std::optional<DenseMatrix> cholesky(const DenseMatrix& x);

}  // namespace ubmat::oracle
