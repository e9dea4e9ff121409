#include "ubmat/ub_matrix.hpp"

#include "ubmat/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ubmat {

namespace {

void require_same_partition(const UBMatrix& x, const UBMatrix& y,
                            const char* op) {
  if (x.partition() != y.partition()) {
    throw InvalidInput(std::string(op) + ": partition mismatch (" +
                       x.partition().to_string() + " vs " +
                       y.partition().to_string() + ")");
  }
}

void require_symmetric(const UBMatrix& x, const char* op) {
  if (!x.is_symmetric()) {
    throw InvalidInput(std::string(op) +
                       " requires a symmetric uniform-block matrix");
  }
}

double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double asymmetry(const Eigen::MatrixXd& m) {
  return max_abs(m - m.transpose());
}

// Eigenpairs of the symmetric matrix similar to Delta, decreasing.
struct DeltaSpectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // columns, orthonormal
};

DeltaSpectrum delta_spectrum(const UBMatrix& x, bool with_vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      x.symmetric_delta(),
      with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error("symmetric eigensolver failed on Delta");
  }
  DeltaSpectrum out;
  out.values = solver.eigenvalues().reverse();
  if (with_vectors) out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

}  // namespace

UBMatrix::UBMatrix(Eigen::VectorXd a, Eigen::MatrixXd b, Partition partition,
                   const Tolerances& tol)
    : a_(std::move(a)), b_(std::move(b)), partition_(std::move(partition)) {
  const Index k = partition_.blocks();
  if (a_.size() != k || b_.rows() != k || b_.cols() != k) {
    throw InvalidInput("coordinates do not match partition with " +
                       std::to_string(k) + " blocks");
  }
  if (!a_.allFinite() || !b_.allFinite()) {
    throw InvalidInput("coordinates must be finite");
  }
  const double asym = asymmetry(b_);
  if (asym > tol.symmetry * max_abs(b_)) {
    std::ostringstream os;
    os << "B is not symmetric (max |b_kk' - b_k'k| = " << asym << ")";
    throw InvalidInput(os.str());
  }
  b_.triangularView<Eigen::StrictlyLower>() = b_.transpose();
}

UBMatrix::UBMatrix(Unchecked, Eigen::VectorXd a, Eigen::MatrixXd b,
                   Partition partition, bool symmetric)
    : a_(std::move(a)),
      b_(std::move(b)),
      partition_(std::move(partition)),
      symmetric_(symmetric) {}

UBMatrix UBMatrix::general(Eigen::VectorXd a, Eigen::MatrixXd b,
                           Partition partition) {
  const Index k = partition.blocks();
  if (a.size() != k || b.rows() != k || b.cols() != k) {
    throw InvalidInput("coordinates do not match partition");
  }
  const bool symmetric = asymmetry(b) == 0.0;
  return UBMatrix(Unchecked{}, std::move(a), std::move(b), std::move(partition),
                  symmetric);
}

UBMatrix UBMatrix::identity(const Partition& partition) {
  const Index k = partition.blocks();
  return UBMatrix(Unchecked{}, Eigen::VectorXd::Ones(k),
                  Eigen::MatrixXd::Zero(k, k), partition, true);
}

UBMatrix UBMatrix::zero(const Partition& partition) {
  const Index k = partition.blocks();
  return UBMatrix(Unchecked{}, Eigen::VectorXd::Zero(k),
                  Eigen::MatrixXd::Zero(k, k), partition, true);
}

Eigen::MatrixXd UBMatrix::delta() const {
  Eigen::MatrixXd d = b_ * partition_.sizes_vector().asDiagonal();
  d.diagonal() += a_;
  return d;
}

Eigen::MatrixXd UBMatrix::symmetric_delta() const {
  const Eigen::VectorXd root = partition_.sizes_vector().cwiseSqrt();
  Eigen::MatrixXd d = root.asDiagonal() * b_ * root.asDiagonal();
  d.diagonal() += a_;
  return d;
}

double UBMatrix::entry(Index i, Index j) const {
  const Index bi = partition_.block_of(i);
  const Index bj = partition_.block_of(j);
  return b_(bi, bj) + (i == j ? a_(bi) : 0.0);
}

UBMatrix add(const UBMatrix& x, const UBMatrix& y) {
  require_same_partition(x, y, "add");
  return UBMatrix::general(x.a() + y.a(), x.b() + y.b(), x.partition());
}

UBMatrix subtract(const UBMatrix& x, const UBMatrix& y) {
  require_same_partition(x, y, "subtract");
  return UBMatrix::general(x.a() - y.a(), x.b() - y.b(), x.partition());
}

UBMatrix scale(const UBMatrix& x, double c) {
  return UBMatrix::general(c * x.a(), c * x.b(), x.partition());
}

UBMatrix multiply(const UBMatrix& x, const UBMatrix& y, const Tolerances& tol) {
  require_same_partition(x, y, "multiply");
  const Eigen::VectorXd p = x.partition().sizes_vector();
  Eigen::VectorXd a = x.a().cwiseProduct(y.a());
  Eigen::MatrixXd b = x.a().asDiagonal() * y.b();
  b += x.b() * y.a().asDiagonal();
  b += x.b() * p.asDiagonal() * y.b();
  if (x.is_symmetric() && y.is_symmetric() &&
      asymmetry(b) <= tol.symmetry * max_abs(b)) {
    Eigen::MatrixXd sym = 0.5 * (b + b.transpose());
    return UBMatrix::general(std::move(a), std::move(sym), x.partition());
  }
  return UBMatrix::general(std::move(a), std::move(b), x.partition());
}

UBMatrix power(const UBMatrix& x, int m) {
  if (m < 1) throw InvalidInput("power: exponent must be >= 1");
  const Eigen::VectorXd p = x.partition().sizes_vector();
  Eigen::VectorXd a = x.a();
  Eigen::MatrixXd b = x.b();
  for (int step = 2; step <= m; ++step) {
    Eigen::MatrixXd next = a.asDiagonal() * x.b();
    next += b * x.a().asDiagonal();
    next += b * p.asDiagonal() * x.b();
    a = a.cwiseProduct(x.a());
    b = std::move(next);
    // Powers of a symmetric matrix commute with it; drop rounding asymmetry.
    if (x.is_symmetric()) b = 0.5 * (b + b.transpose()).eval();
  }
  return UBMatrix::general(std::move(a), std::move(b), x.partition());
}

std::vector<SpectralValue> eigenvalues(const UBMatrix& x) {
  require_symmetric(x, "eigenvalues");
  std::vector<SpectralValue> out;
  out.reserve(static_cast<std::size_t>(2 * x.blocks()));
  for (Index k = 0; k < x.blocks(); ++k) {
    out.push_back({x.a()(k), x.partition().size(k) - 1,
                   SpectralValue::Source::within_block, k});
  }
  const DeltaSpectrum spec = delta_spectrum(x, false);
  for (Index j = 0; j < spec.values.size(); ++j) {
    out.push_back({spec.values(j), 1, SpectralValue::Source::delta, j});
  }
  return out;
}

Eigen::VectorXd eigenvalue_list(const UBMatrix& x) {
  Eigen::VectorXd out(x.dim());
  Index pos = 0;
  for (const SpectralValue& s : eigenvalues(x))
    for (Index r = 0; r < s.multiplicity; ++r) out(pos++) = s.value;
  std::sort(out.data(), out.data() + out.size(), std::greater<double>());
  return out;
}

double determinant(const UBMatrix& x) {
  double det = Eigen::PartialPivLU<Eigen::MatrixXd>(x.delta()).determinant();
  for (Index k = 0; k < x.blocks(); ++k) {
    det *= std::pow(x.a()(k), static_cast<double>(x.partition().size(k) - 1));
  }
  return det;
}

LogDeterminant log_determinant(const UBMatrix& x) {
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(x.delta());
  double log_abs = 0.0;
  int sign = (lu.permutationP().determinant() > 0) ? 1 : -1;
  const auto diag = lu.matrixLU().diagonal();
  for (Index i = 0; i < diag.size(); ++i) {
    if (diag(i) == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
    if (diag(i) < 0) sign = -sign;
    log_abs += std::log(std::abs(diag(i)));
  }
  for (Index k = 0; k < x.blocks(); ++k) {
    const double a = x.a()(k);
    const Index mult = x.partition().size(k) - 1;
    if (a == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
    if (a < 0 && mult % 2 == 1) sign = -sign;
    log_abs += static_cast<double>(mult) * std::log(std::abs(a));
  }
  return {log_abs, sign};
}

UBMatrix inverse(const UBMatrix& x, const Tolerances& tol) {
  require_symmetric(x, "inverse");
  const double a_scale = x.a().cwiseAbs().maxCoeff();
  for (Index k = 0; k < x.blocks(); ++k) {
    const double a = x.a()(k);
    if (std::abs(a) <= tol.singular_pivot * a_scale || a_scale == 0.0) {
      std::ostringstream os;
      os << "singular uniform-block matrix: a_" << k + 1 << k + 1 << " = " << a;
      throw SingularError(SingularFactor::within_block, k, a, os.str());
    }
  }
  const Eigen::MatrixXd delta = x.delta();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(delta);
  const double d_scale = max_abs(delta);
  const auto diag = lu.matrixLU().diagonal();
  for (Index i = 0; i < diag.size(); ++i) {
    if (std::abs(diag(i)) <= tol.singular_pivot * d_scale || d_scale == 0.0) {
      std::ostringstream os;
      os << "singular uniform-block matrix: Delta pivot " << i + 1 << " = "
         << diag(i);
      throw SingularError(SingularFactor::delta, i, diag(i), os.str());
    }
  }
  const Eigen::VectorXd a_inv = x.a().cwiseInverse();
  const Eigen::MatrixXd rhs = x.b() * a_inv.asDiagonal();
  Eigen::MatrixXd b = -lu.solve(rhs);
  b = 0.5 * (b + b.transpose()).eval();
  return UBMatrix::general(a_inv, std::move(b), x.partition());
}

bool is_positive_definite(const UBMatrix& x, const Tolerances& tol) {
  require_symmetric(x, "is_positive_definite");
  const DeltaSpectrum spec = delta_spectrum(x, false);
  const double scale =
      std::max(x.a().cwiseAbs().maxCoeff(), spec.values.cwiseAbs().maxCoeff());
  if (scale == 0.0) return false;
  const double threshold = tol.positivity * scale;
  return x.a().minCoeff() > threshold && spec.values.minCoeff() > threshold;
}

SpectralForm canonical_form(const UBMatrix& x) {
  require_symmetric(x, "canonical_form");
  const DeltaSpectrum spec = delta_spectrum(x, true);
  const Eigen::VectorXd inv_root =
      x.partition().sizes_vector().cwiseSqrt().cwiseInverse();
  SpectralForm form{x.partition(), x.a(), spec.values,
                    Eigen::MatrixXd(x.blocks(), x.blocks()), false};
  for (Index j = 0; j < x.blocks(); ++j) {
    Eigen::VectorXd xi = inv_root.cwiseProduct(spec.vectors.col(j));
    // Fix the sign: first entry of largest magnitude is positive.
    Index lead = 0;
    xi.cwiseAbs().maxCoeff(&lead);
    if (xi(lead) < 0) xi = -xi;
    form.xi.row(j) = xi.transpose();
  }
  const double scale = std::max(1e-300, spec.values.cwiseAbs().maxCoeff());
  for (Index j = 0; j + 1 < spec.values.size(); ++j) {
    if (spec.values(j) - spec.values(j + 1) <= 1e-10 * scale) {
      form.repeated_delta_values = true;
    }
  }
  return form;
}

Eigen::VectorXd SpectralForm::diagonal() const {
  Eigen::VectorXd d(partition.dim());
  for (Index k = 0; k < partition.blocks(); ++k) {
    const Index o = partition.offset(k);
    const Index n = partition.size(k);
    d.segment(o, n - 1).setConstant(within_block(k));
    d(o + n - 1) = delta_values(k);
  }
  return d;
}

Eigen::VectorXd SpectralForm::apply(const Eigen::VectorXd& v) const {
  if (v.size() != partition.dim()) throw InvalidInput("Gamma v: size mismatch");
  Eigen::VectorXd out(v.size());
  const Eigen::VectorXd sums = block_sums(partition, v);
  for (Index k = 0; k < partition.blocks(); ++k) {
    const Index o = partition.offset(k);
    const Index n = partition.size(k);
    double prefix = v(o);
    for (Index j = 2; j <= n; ++j) {
      const double jj = static_cast<double>(j);
      out(o + j - 2) =
          (prefix - (jj - 1.0) * v(o + j - 1)) / std::sqrt(jj * (jj - 1.0));
      prefix += v(o + j - 1);
    }
    out(o + n - 1) = xi.row(k).dot(sums);
  }
  return out;
}

Eigen::VectorXd SpectralForm::apply_transpose(const Eigen::VectorXd& w) const {
  if (w.size() != partition.dim()) {
    throw InvalidInput("Gamma^T w: size mismatch");
  }
  const Index nblocks = partition.blocks();
  Eigen::VectorXd mean_part(nblocks);
  for (Index k = 0; k < nblocks; ++k) {
    mean_part(k) = w(partition.offset(k) + partition.size(k) - 1);
  }
  const Eigen::VectorXd level = xi.transpose() * mean_part;
  Eigen::VectorXd out(w.size());
  for (Index k = 0; k < nblocks; ++k) {
    const Index o = partition.offset(k);
    const Index n = partition.size(k);
    // Column i (1-based) collects c_j / sqrt(j(j-1)) for rows j > i and
    // -(i-1) c_i / sqrt(i(i-1)) from row i itself.
    double suffix = 0.0;
    for (Index i = n; i >= 1; --i) {
      const double ii = static_cast<double>(i);
      double value = suffix;
      if (i >= 2) {
        const double c = w(o + i - 2);
        const double norm = std::sqrt(ii * (ii - 1.0));
        value -= (ii - 1.0) * c / norm;
        suffix += c / norm;
      }
      out(o + i - 1) = value + level(k);
    }
  }
  return out;
}

DenseMatrix SpectralForm::gamma() const {
  const Index p = partition.dim();
  DenseMatrix g(p, p);
  for (Index k = 0; k < partition.blocks(); ++k) {
    const Index o = partition.offset(k);
    const Index n = partition.size(k);
    for (Index j = 2; j <= n; ++j) {
      const double jj = static_cast<double>(j);
      const double norm = std::sqrt(jj * (jj - 1.0));
      for (Index i = 0; i < j - 1; ++i) g(o + j - 2, o + i) = 1.0 / norm;
      g(o + j - 2, o + j - 1) = -(jj - 1.0) / norm;
    }
    for (Index kk = 0; kk < partition.blocks(); ++kk) {
      for (Index i = 0; i < partition.size(kk); ++i) {
        g(o + n - 1, partition.offset(kk) + i) = xi(k, kk);
      }
    }
  }
  return g;
}

DenseMatrix helmert_matrix(Index n) {
  if (n < 1) throw InvalidInput("Helmert matrix order must be >= 1");
  DenseMatrix h(n, n);
  const double first = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index i = 0; i < n; ++i) h(0, i) = first;
  for (Index j = 2; j <= n; ++j) {
    const double jj = static_cast<double>(j);
    const double norm = std::sqrt(jj * (jj - 1.0));
    for (Index i = 0; i < j - 1; ++i) h(j - 1, i) = 1.0 / norm;
    h(j - 1, j - 1) = -(jj - 1.0) / norm;
  }
  return h;
}

UBMatrix precision_coordinates(const UBMatrix& sigma, const Tolerances& tol) {
  require_symmetric(sigma, "precision_coordinates");
  if (!is_positive_definite(sigma, tol)) {
    throw DomainError("covariance is not positive definite");
  }
  return inverse(sigma, tol);
}

UBMatrix correlation_coordinates(const UBMatrix& sigma) {
  require_symmetric(sigma, "correlation_coordinates");
  const Eigen::VectorXd c = sigma.a() + sigma.b().diagonal();
  for (Index k = 0; k < c.size(); ++k) {
    if (!(c(k) > 0.0)) {
      std::ostringstream os;
      os << "variance of block " << k + 1 << " is not positive (" << c(k)
         << ")";
      throw DomainError(os.str());
    }
  }
  const Eigen::VectorXd s = c.cwiseSqrt().cwiseInverse();
  const Eigen::VectorXd a = sigma.a().cwiseQuotient(c);
  Eigen::MatrixXd b = s.asDiagonal() * sigma.b() * s.asDiagonal();
  b = 0.5 * (b + b.transpose()).eval();
  b.diagonal() = Eigen::VectorXd::Ones(c.size()) - a;
  return UBMatrix::general(a, std::move(b), sigma.partition());
}

DenseMatrix expand(const UBMatrix& x) {
  const Partition& part = x.partition();
  DenseMatrix m(part.dim(), part.dim());
  for (Index k = 0; k < part.blocks(); ++k) {
    for (Index kk = 0; kk < part.blocks(); ++kk) {
      const double value = x.b()(k, kk);
      for (Index i = 0; i < part.size(k); ++i)
        for (Index j = 0; j < part.size(kk); ++j)
          m(part.offset(k) + i, part.offset(kk) + j) = value;
    }
    for (Index i = 0; i < part.size(k); ++i) {
      m(part.offset(k) + i, part.offset(k) + i) += x.a()(k);
    }
  }
  return m;
}

UBMatrix compress(const DenseMatrix& m, const Partition& partition,
                  const Tolerances& tol) {
  const Index p = partition.dim();
  if (m.rows() != p || m.cols() != p) {
    throw InvalidInput("compress: matrix is " + std::to_string(m.rows()) + "x" +
                       std::to_string(m.cols()) + " but partition totals " +
                       std::to_string(p));
  }
  const Index nblocks = partition.blocks();
  Eigen::VectorXd a(nblocks);
  Eigen::MatrixXd b(nblocks, nblocks);
  double worst_ratio = 0.0;
  double worst_dev = 0.0;
  Index worst_k = -1;
  Index worst_kk = -1;
  for (Index k = 0; k < nblocks; ++k) {
    const Index ok = partition.offset(k);
    for (Index kk = k; kk < nblocks; ++kk) {
      const Index okk = partition.offset(kk);
      const double off = (k == kk) ? m(ok + 1, ok) : m(ok, okk);
      const double diag = m(ok, ok);
      double dev = 0.0;
      double block_scale = 0.0;
      for (Index i = 0; i < partition.size(k); ++i) {
        for (Index j = 0; j < partition.size(kk); ++j) {
          const double upper = m(ok + i, okk + j);
          const double lower = m(okk + j, ok + i);
          const double ref = (k == kk && i == j) ? diag : off;
          dev = std::max({dev, std::abs(upper - ref), std::abs(lower - ref)});
          block_scale =
              std::max({block_scale, std::abs(upper), std::abs(lower)});
        }
      }
      if (dev > tol.uniformity * block_scale) {
        const double ratio = dev / block_scale;
        if (ratio > worst_ratio) {
          worst_ratio = ratio;
          worst_dev = dev;
          worst_k = k;
          worst_kk = kk;
        }
      }
      b(k, kk) = off;
      b(kk, k) = off;
      if (k == kk) a(k) = diag - off;
    }
  }
  if (worst_k >= 0) {
    std::ostringstream os;
    os << "matrix is not uniform-block for partition " << partition.to_string()
       << ": block (" << worst_k + 1 << "," << worst_kk + 1
       << ") deviates by " << worst_dev << " (relative " << worst_ratio
       << ", tolerance " << tol.uniformity << ")";
    throw StructureError(worst_k, worst_kk, worst_dev, os.str());
  }
  return UBMatrix::general(std::move(a), std::move(b), partition);
}

Eigen::VectorXd block_sums(const Partition& partition,
                           const Eigen::VectorXd& v) {
  if (v.size() != partition.dim()) {
    throw InvalidInput("vector length " + std::to_string(v.size()) +
                       " does not match partition total " +
                       std::to_string(partition.dim()));
  }
  Eigen::VectorXd s(partition.blocks());
  for (Index k = 0; k < partition.blocks(); ++k) {
    s(k) = v.segment(partition.offset(k), partition.size(k)).sum();
  }
  return s;
}

Eigen::VectorXd apply(const UBMatrix& x, const Eigen::VectorXd& v) {
  const Partition& part = x.partition();
  const Eigen::VectorXd level = x.b() * block_sums(part, v);
  Eigen::VectorXd out(v.size());
  for (Index k = 0; k < part.blocks(); ++k) {
    const Index o = part.offset(k);
    const Index n = part.size(k);
    out.segment(o, n) = x.a()(k) * v.segment(o, n);
    out.segment(o, n).array() += level(k);
  }
  return out;
}

double quadratic_form(const UBMatrix& x, const Eigen::VectorXd& v) {
  const Partition& part = x.partition();
  const Eigen::VectorXd s = block_sums(part, v);
  double total = s.dot(x.b() * s);
  for (Index k = 0; k < part.blocks(); ++k) {
    total += x.a()(k) * v.segment(part.offset(k), part.size(k)).squaredNorm();
  }
  return total;
}

}  // namespace ubmat
