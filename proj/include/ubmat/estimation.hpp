#pragma once

#include "ubmat/partition.hpp"
#include "ubmat/ub_matrix.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace ubmat {

/// n observations of a p-variate vector laid out by `partition`, with
/// optional group labels 1..M (one per row).
class Dataset {
 public:
  Dataset(Eigen::MatrixXd observations, Partition partition,
          std::optional<std::vector<int>> labels = std::nullopt);

  const Eigen::MatrixXd& observations() const noexcept { return x_; }
  const Partition& partition() const noexcept { return partition_; }
  Index rows() const noexcept { return x_.rows(); }
  bool grouped() const noexcept { return labels_.has_value(); }
  const std::vector<int>& labels() const;
  /// M; 1 for an ungrouped dataset.
  int groups() const noexcept { return groups_; }

 private:
  Eigen::MatrixXd x_;
  Partition partition_;
  std::optional<std::vector<int>> labels_;
  int groups_ = 1;
};

struct SampleMoments {
  Eigen::VectorXd mean;                     // grand mean
  std::vector<Eigen::VectorXd> group_means; // one per group (mean when M=1)
  std::vector<Index> group_sizes;
  /// Unbiased covariance: divisor n - 1, or n - M pooled within groups.
  Eigen::MatrixXd cov;
  Index n = 0;
  int groups = 1;
};

/// Two-pass means and (pooled) covariance.
SampleMoments sample_moments(const Dataset& d);

struct EstimationOptions {
  /// Skip the n > K + K(K+1)/2 check.
  bool allow_small_n = false;
};

/// Block-average coordinates of a p x p matrix:
///   a_kk  = [p_k tr(S_kk) - sum(S_kk)] / [p_k (p_k - 1)]
///   b_kk  = [sum(S_kk) - tr(S_kk)] / [p_k (p_k - 1)]
///   b_kk' = sum(S_kk') / (p_k p_k')
UBMatrix block_average_coordinates(const Eigen::MatrixXd& s,
                                   const Partition& partition);

/// Unbiased coordinate estimates from sample moments.
UBMatrix estimate_coordinates(const SampleMoments& m,
                              const Partition& partition,
                              const EstimationOptions& options = {});

struct PrecisionDiagnostics {
  double min_a;
  double min_delta_eigenvalue;
};

PrecisionDiagnostics precision_diagnostics(const UBMatrix& estimate);

/// Plug-in precision coordinates. Throws DomainError, quoting the smallest
/// a_kk and Delta eigenvalue, when the estimate is not positive definite.
UBMatrix estimate_precision(const UBMatrix& estimate,
                            const Tolerances& tol = {});

}  // namespace ubmat
