#include "ubmat/estimation.hpp"

#include "ubmat/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <sstream>

namespace ubmat {

Dataset::Dataset(Eigen::MatrixXd observations, Partition partition,
                 std::optional<std::vector<int>> labels)
    : x_(std::move(observations)),
      partition_(std::move(partition)),
      labels_(std::move(labels)) {
  if (x_.cols() != partition_.dim()) {
    throw InvalidInput("dataset has " + std::to_string(x_.cols()) +
                       " columns but the partition " + partition_.to_string() +
                       " sums to " + std::to_string(partition_.dim()));
  }
  if (x_.rows() < 2) throw InvalidInput("dataset needs at least 2 rows");
  if (!x_.allFinite()) throw InvalidInput("dataset contains non-finite values");
  if (!labels_) return;
  if (static_cast<Index>(labels_->size()) != x_.rows()) {
    throw InvalidInput("got " + std::to_string(labels_->size()) +
                       " group labels for " + std::to_string(x_.rows()) +
                       " rows");
  }
  const int m = *std::max_element(labels_->begin(), labels_->end());
  std::vector<Index> counts(static_cast<std::size_t>(std::max(m, 0)), 0);
  for (int g : *labels_) {
    if (g < 1) throw InvalidInput("group labels must be integers 1..M");
    ++counts[static_cast<std::size_t>(g - 1)];
  }
  for (std::size_t g = 0; g < counts.size(); ++g) {
    if (counts[g] == 0) {
      throw InvalidInput("group " + std::to_string(g + 1) +
                         " has no observations");
    }
  }
  groups_ = m;
}

const std::vector<int>& Dataset::labels() const {
  if (!labels_) throw InvalidInput("dataset has no group labels");
  return *labels_;
}

SampleMoments sample_moments(const Dataset& d) {
  const Eigen::MatrixXd& x = d.observations();
  const Index n = x.rows();
  const Index p = x.cols();
  const int m = d.groups();
  if (n <= m) {
    throw DomainError("need more observations (" + std::to_string(n) +
                      ") than groups (" + std::to_string(m) + ")");
  }
  SampleMoments out;
  out.n = n;
  out.groups = m;
  out.group_sizes.assign(static_cast<std::size_t>(m), 0);
  out.group_means.assign(static_cast<std::size_t>(m), Eigen::VectorXd::Zero(p));

  auto group = [&](Index i) -> std::size_t {
    return d.grouped() ? static_cast<std::size_t>(d.labels()[static_cast<std::size_t>(i)] - 1)
                       : 0;
  };
  for (Index i = 0; i < n; ++i) {
    out.group_means[group(i)] += x.row(i).transpose();
    ++out.group_sizes[group(i)];
  }
  out.mean = Eigen::VectorXd::Zero(p);
  for (std::size_t g = 0; g < out.group_means.size(); ++g) {
    out.mean += out.group_means[g];
    out.group_means[g] /= static_cast<double>(out.group_sizes[g]);
  }
  out.mean /= static_cast<double>(n);
  if (m == 1) out.group_means[0] = out.mean;

  Eigen::MatrixXd centered(n, p);
  for (Index i = 0; i < n; ++i) {
    centered.row(i) = x.row(i) - out.group_means[group(i)].transpose();
  }
  out.cov = centered.transpose() * centered / static_cast<double>(n - m);
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

UBMatrix block_average_coordinates(const Eigen::MatrixXd& s,
                                   const Partition& partition) {
  const Index k = partition.blocks();
  if (s.rows() != partition.dim() || s.cols() != partition.dim()) {
    throw InvalidInput("matrix is " + std::to_string(s.rows()) + "x" +
                       std::to_string(s.cols()) + " but the partition sums to " +
                       std::to_string(partition.dim()));
  }
  Eigen::VectorXd a(k);
  Eigen::MatrixXd b(k, k);
  for (Index r = 0; r < k; ++r) {
    const Index pr = partition.size(r);
    for (Index c = r; c < k; ++c) {
      const Index pc = partition.size(c);
      const auto block = s.block(partition.offset(r), partition.offset(c), pr, pc);
      const double sum = block.sum();
      if (r == c) {
        const double tr = block.trace();
        const double denom = static_cast<double>(pr * (pr - 1));
        a(r) = (static_cast<double>(pr) * tr - sum) / denom;
        b(r, r) = (sum - tr) / denom;
      } else {
        const double lower = s.block(partition.offset(c), partition.offset(r), pc, pr).sum();
        b(r, c) = b(c, r) = 0.5 * (sum + lower) / static_cast<double>(pr * pc);
      }
    }
  }
  return UBMatrix(std::move(a), std::move(b), partition);
}

UBMatrix estimate_coordinates(const SampleMoments& m, const Partition& partition,
                              const EstimationOptions& options) {
  const Index k = partition.blocks();
  const Index needed = k + k * (k + 1) / 2;
  if (!options.allow_small_n && m.n <= needed) {
    throw DomainError("n = " + std::to_string(m.n) + " must exceed K + K(K+1)/2 = " +
                      std::to_string(needed) +
                      " (use --allow-small-n to override)");
  }
  return block_average_coordinates(m.cov, partition);
}

PrecisionDiagnostics precision_diagnostics(const UBMatrix& estimate) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      estimate.symmetric_delta(), Eigen::EigenvaluesOnly);
  return {estimate.a().minCoeff(), solver.eigenvalues().minCoeff()};
}

UBMatrix estimate_precision(const UBMatrix& estimate, const Tolerances& tol) {
  if (!is_positive_definite(estimate, tol)) {
    const PrecisionDiagnostics diag = precision_diagnostics(estimate);
    std::ostringstream msg;
    msg << "estimated covariance is not positive definite (min a_kk = "
        << diag.min_a << ", min eigenvalue of Delta = "
        << diag.min_delta_eigenvalue
        << "); increase n or check that the block structure fits the data";
    throw DomainError(msg.str());
  }
  return inverse(estimate, tol);
}

}  // namespace ubmat
