#pragma once

#include "ubmat/dense_matrix.hpp"
#include "ubmat/partition.hpp"

#include <Eigen/Core>

#include <vector>

namespace ubmat {

/// Numerical thresholds shared by the coordinate operations.
struct Tolerances {
  /// Block uniformity in compress(), relative to the block's largest entry.
  double uniformity = 1e-8;
  /// Pivot threshold for A and Delta, relative to their largest entry.
  double singular_pivot = 1e-12;
  /// Symmetry of B, and the commutation test in multiply(), relative to the
  /// largest |b_kk'|.
  double symmetry = 1e-10;
  /// Positive-definiteness threshold on a_kk and the Delta eigenvalues,
  /// relative to the largest eigenvalue magnitude.
  double positivity = 1e-12;
};

/// A p x p uniform-block matrix stored by its coordinates (A, B, p):
///
///   N[A, B, p] = A o I[p] + B o J[p]
///
/// so diagonal block k is a_kk I + b_kk J and off-diagonal block (k, k') is
/// b_kk' times the all-ones matrix. The p x p matrix is never formed.
///
/// Values are immutable. A matrix built with the public constructor is
/// symmetric: B is checked and its upper triangle copied to the lower one.
/// multiply() of two non-commuting matrices yields a general (non-symmetric)
/// value, which the spectral operations reject.
class UBMatrix {
 public:
  UBMatrix(Eigen::VectorXd a, Eigen::MatrixXd b, Partition partition,
           const Tolerances& tol = {});

  /// Coordinates of a possibly non-symmetric uniform-block matrix.
  static UBMatrix general(Eigen::VectorXd a, Eigen::MatrixXd b,
                          Partition partition);
  static UBMatrix identity(const Partition& partition);
  static UBMatrix zero(const Partition& partition);

  const Eigen::VectorXd& a() const noexcept { return a_; }
  const Eigen::MatrixXd& b() const noexcept { return b_; }
  const Partition& partition() const noexcept { return partition_; }
  bool is_symmetric() const noexcept { return symmetric_; }

  Index blocks() const noexcept { return partition_.blocks(); }
  Index dim() const noexcept { return partition_.dim(); }

  /// Delta = A + B P. Not symmetric in general.
  Eigen::MatrixXd delta() const;
  /// A + P^{1/2} B P^{1/2}, the symmetric matrix similar to Delta.
  Eigen::MatrixXd symmetric_delta() const;

  /// Entry (i, j) of the expanded matrix.
  double entry(Index i, Index j) const;

  friend bool operator==(const UBMatrix& x, const UBMatrix& y) {
    return x.partition_ == y.partition_ && x.symmetric_ == y.symmetric_ &&
           x.a_ == y.a_ && x.b_ == y.b_;
  }

 private:
  struct Unchecked {};
  UBMatrix(Unchecked, Eigen::VectorXd a, Eigen::MatrixXd b,
           Partition partition, bool symmetric);

  Eigen::VectorXd a_;
  Eigen::MatrixXd b_;
  Partition partition_;
  bool symmetric_ = true;
};

UBMatrix add(const UBMatrix& x, const UBMatrix& y);
UBMatrix subtract(const UBMatrix& x, const UBMatrix& y);
UBMatrix scale(const UBMatrix& x, double c);

/// Product coordinates A1 A2 and A1 B2 + B1 A2 + B1 P B2.
///
/// The product is uniform-block whatever the inputs; it is symmetric exactly
/// when the factors commute, which is the case iff the B coordinate is
/// symmetric. A commuting result is symmetrized; otherwise the raw
/// coordinates come back flagged as general.
UBMatrix multiply(const UBMatrix& x, const UBMatrix& y,
                  const Tolerances& tol = {});

/// x^m for m >= 1 by repeated multiplication in coordinates.
UBMatrix power(const UBMatrix& x, int m);

struct SpectralValue {
  enum class Source { within_block, delta };
  double value;
  Index multiplicity;
  Source source;
  /// Block k for within-block values; rank (0 = largest) for Delta values.
  Index index;
};

/// a_kk with multiplicity p_k - 1 for every block, followed by the K
/// eigenvalues of Delta in decreasing order. Multiplicities sum to p.
std::vector<SpectralValue> eigenvalues(const UBMatrix& x);

/// All p eigenvalues, sorted decreasing.
Eigen::VectorXd eigenvalue_list(const UBMatrix& x);

/// (prod_k a_kk^{p_k - 1}) det(Delta).
double determinant(const UBMatrix& x);

struct LogDeterminant {
  double log_abs;  // -inf for a singular matrix
  int sign;        // -1, 0 or +1
};
LogDeterminant log_determinant(const UBMatrix& x);

/// Coordinates A^{-1} and -Delta^{-1} B A^{-1}. Throws SingularError naming
/// the factor (A or Delta) whose pivot fell below tolerance.
UBMatrix inverse(const UBMatrix& x, const Tolerances& tol = {});

/// a_kk > 0 for every k and all eigenvalues of Delta positive.
bool is_positive_definite(const UBMatrix& x, const Tolerances& tol = {});

/// Orthogonal diagonalization Gamma N Gamma^T = diag(lambda).
///
/// Gamma has, for block k, the rows of the Helmert matrix of order p_k
/// without its first row (placed on the columns of block k), followed by the
/// row (xi_k1 1, ..., xi_kK 1). Helmert row j (2 <= j <= p_k) has j - 1
/// entries 1/sqrt(j(j-1)), then -(j-1)/sqrt(j(j-1)), then zeros. xi_k is the
/// eigenvector of Delta for its k-th largest eigenvalue, scaled so that the
/// expanded row has unit length (xi_k^T P xi_k = 1).
struct SpectralForm {
  Partition partition;
  Eigen::VectorXd within_block;  // a_kk
  Eigen::VectorXd delta_values;  // decreasing
  Eigen::MatrixXd xi;            // row k pairs with delta_values(k)
  /// Delta has (numerically) repeated eigenvalues; the eigenspace basis is
  /// whatever the eigensolver produced.
  bool repeated_delta_values = false;

  /// diag(lambda) in Gamma's row order: a_kk on the Helmert rows of block k,
  /// delta_values(k) on the last row of block k.
  Eigen::VectorXd diagonal() const;
  /// Gamma v in O(p + K^2).
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  /// Gamma^T w in O(p + K^2).
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& w) const;
  DenseMatrix gamma() const;
};

SpectralForm canonical_form(const UBMatrix& x);

/// Standard Helmert matrix of order n (first row 1/sqrt(n)).
DenseMatrix helmert_matrix(Index n);

/// Precision coordinates of a positive definite covariance. Throws
/// DomainError when sigma is not positive definite.
UBMatrix precision_coordinates(const UBMatrix& sigma,
                               const Tolerances& tol = {});

/// Coordinates of corr(sigma): C^{-1/2} A C^{-1/2} and C^{-1/2} B C^{-1/2}
/// with c_kk = a_kk + b_kk. The diagonal coordinate b_kk is set to
/// 1 - a_kk so the expanded diagonal is one.
UBMatrix correlation_coordinates(const UBMatrix& sigma);

DenseMatrix expand(const UBMatrix& x);

/// Reads (A, B) back from a dense symmetric matrix. Throws StructureError
/// with the worst block when a block deviates from uniformity.
UBMatrix compress(const DenseMatrix& m, const Partition& partition,
                  const Tolerances& tol = {});

/// Per-block sums 1^T v_k.
Eigen::VectorXd block_sums(const Partition& partition,
                           const Eigen::VectorXd& v);
/// N v in O(p + K^2).
Eigen::VectorXd apply(const UBMatrix& x, const Eigen::VectorXd& v);
/// v^T N v in O(p + K^2).
double quadratic_form(const UBMatrix& x, const Eigen::VectorXd& v);

}  // namespace ubmat
