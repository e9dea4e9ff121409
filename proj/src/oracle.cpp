#include "ubmat/oracle.hpp"

#include "ubmat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ubmat::oracle {

using Idx = std::ptrdiff_t;

namespace {

void require_square(const DenseMatrix& x, const char* op) {
  if (x.rows() != x.cols()) {
    throw InvalidInput(std::string(op) + ": matrix must be square");
  }
}

double max_entry(const DenseMatrix& x) {
  double m = 0.0;
  for (double v : x.entries()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

DenseMatrix matmul(const DenseMatrix& x, const DenseMatrix& y) {
  if (x.cols() != y.rows()) {
    throw InvalidInput("matmul: inner dimensions differ");
  }
  DenseMatrix out(x.rows(), y.cols());
  for (Idx i = 0; i < x.rows(); ++i)
    for (Idx j = 0; j < y.cols(); ++j) {
      double s = 0.0;
      for (Idx k = 0; k < x.cols(); ++k) s += x(i, k) * y(k, j);
      out(i, j) = s;
    }
  return out;
}

DenseMatrix add(const DenseMatrix& x, const DenseMatrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw InvalidInput("add: shape mismatch");
  }
  DenseMatrix out(x.rows(), x.cols());
  for (Idx i = 0; i < x.rows(); ++i)
    for (Idx j = 0; j < x.cols(); ++j) out(i, j) = x(i, j) + y(i, j);
  return out;
}

DenseMatrix subtract(const DenseMatrix& x, const DenseMatrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw InvalidInput("subtract: shape mismatch");
  }
  DenseMatrix out(x.rows(), x.cols());
  for (Idx i = 0; i < x.rows(); ++i)
    for (Idx j = 0; j < x.cols(); ++j) out(i, j) = x(i, j) - y(i, j);
  return out;
}

DenseMatrix transpose(const DenseMatrix& x) {
  DenseMatrix out(x.cols(), x.rows());
  for (Idx i = 0; i < x.rows(); ++i)
    for (Idx j = 0; j < x.cols(); ++j) out(j, i) = x(i, j);
  return out;
}

std::vector<double> matvec(const DenseMatrix& x, const std::vector<double>& v) {
  if (static_cast<std::size_t>(x.cols()) != v.size()) {
    throw InvalidInput("matvec: dimension mismatch");
  }
  std::vector<double> out(static_cast<std::size_t>(x.rows()), 0.0);
  for (Idx i = 0; i < x.rows(); ++i) {
    double s = 0.0;
    for (Idx j = 0; j < x.cols(); ++j) s += x(i, j) * v[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

LuDecomposition lu(const DenseMatrix& x) {
  require_square(x, "lu");
  const Idx n = x.rows();
  const double threshold = 1e-12 * max_entry(x);
  DenseMatrix work = x;
  std::vector<Idx> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Idx{0});
  int sign = 1;
  for (Idx col = 0; col < n; ++col) {
    Idx pivot_row = col;
    for (Idx r = col + 1; r < n; ++r)
      if (std::abs(work(r, col)) > std::abs(work(pivot_row, col))) pivot_row = r;
    const double pivot = work(pivot_row, col);
    if (std::abs(pivot) <= threshold || threshold == 0.0) {
      throw SingularError(SingularFactor::dense, col, pivot,
                          "dense LU: singular pivot in column " +
                              std::to_string(col + 1));
    }
    if (pivot_row != col) {
      for (Idx j = 0; j < n; ++j) std::swap(work(col, j), work(pivot_row, j));
      std::swap(perm[static_cast<std::size_t>(col)],
                perm[static_cast<std::size_t>(pivot_row)]);
      sign = -sign;
    }
    for (Idx r = col + 1; r < n; ++r) {
      const double factor = work(r, col) / work(col, col);
      work(r, col) = factor;
      for (Idx j = col + 1; j < n; ++j) work(r, j) -= factor * work(col, j);
    }
  }
  LuDecomposition out{DenseMatrix::identity(n), DenseMatrix(n, n), perm, sign};
  for (Idx i = 0; i < n; ++i)
    for (Idx j = 0; j < n; ++j) {
      if (j < i) {
        out.lower(i, j) = work(i, j);
      } else {
        out.upper(i, j) = work(i, j);
      }
    }
  return out;
}

DenseMatrix permute_rows(const DenseMatrix& x, const std::vector<Idx>& permutation) {
  DenseMatrix out(x.rows(), x.cols());
  for (Idx i = 0; i < x.rows(); ++i)
    for (Idx j = 0; j < x.cols(); ++j)
      out(i, j) = x(permutation[static_cast<std::size_t>(i)], j);
  return out;
}

double determinant(const DenseMatrix& x) {
  try {
    const LuDecomposition f = lu(x);
    double det = f.sign;
    for (Idx i = 0; i < x.rows(); ++i) det *= f.upper(i, i);
    return det;
  } catch (const SingularError&) {
    return 0.0;
  }
}

DenseMatrix inverse(const DenseMatrix& x) {
  const LuDecomposition f = lu(x);
  const Idx n = x.rows();
  DenseMatrix out(n, n);
  std::vector<double> y(static_cast<std::size_t>(n));
  for (Idx col = 0; col < n; ++col) {
    // Solve L y = P e_col, then U z = y.
    for (Idx i = 0; i < n; ++i) {
      double s = (f.permutation[static_cast<std::size_t>(i)] == col) ? 1.0 : 0.0;
      for (Idx j = 0; j < i; ++j) s -= f.lower(i, j) * y[static_cast<std::size_t>(j)];
      y[static_cast<std::size_t>(i)] = s;
    }
    for (Idx i = n - 1; i >= 0; --i) {
      double s = y[static_cast<std::size_t>(i)];
      for (Idx j = i + 1; j < n; ++j) s -= f.upper(i, j) * out(j, col);
      out(i, col) = s / f.upper(i, i);
    }
  }
  return out;
}

SymmetricEigen symmetric_eigen(const DenseMatrix& x) {
  require_square(x, "symmetric_eigen");
  if (x.asymmetry() > 1e-10) {
    throw InvalidInput("symmetric_eigen: matrix is not symmetric");
  }
  const Idx n = x.rows();
  DenseMatrix a = x;
  DenseMatrix v = DenseMatrix::identity(n);
  double frob = 0.0;
  for (double e : a.entries()) frob += e * e;
  frob = std::sqrt(frob);
  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Idx i = 0; i < n; ++i)
      for (Idx j = 0; j < n; ++j)
        if (i != j) off += a(i, j) * a(i, j);
    if (std::sqrt(off) < 1e-12 * frob || off == 0.0) break;
    for (Idx p = 0; p < n - 1; ++p) {
      for (Idx q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Idx k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Idx k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Idx k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Idx> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Idx{0});
  std::sort(order.begin(), order.end(),
            [&](Idx i, Idx j) { return a(i, i) > a(j, j); });
  SymmetricEigen out{std::vector<double>(static_cast<std::size_t>(n)),
                     DenseMatrix(n, n)};
  for (Idx j = 0; j < n; ++j) {
    const Idx src = order[static_cast<std::size_t>(j)];
    out.values[static_cast<std::size_t>(j)] = a(src, src);
    for (Idx i = 0; i < n; ++i) out.vectors(i, j) = v(i, src);
  }
  return out;
}

std::optional<DenseMatrix> cholesky(const DenseMatrix& x) {
  require_square(x, "cholesky");
  const Idx n = x.rows();
  DenseMatrix l(n, n);
  for (Idx j = 0; j < n; ++j) {
    double d = x(j, j);
    for (Idx k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 1e-12)) return std::nullopt;
    l(j, j) = std::sqrt(d);
    for (Idx i = j + 1; i < n; ++i) {
      double s = x(i, j);
      for (Idx k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

}  // namespace ubmat::oracle
