#pragma once

#include "ubmat/estimation.hpp"
#include "ubmat/inference.hpp"
#include "ubmat/random.hpp"
#include "ubmat/ub_matrix.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

namespace ubmat {

/// Draws N(mu, Sigma) vectors through the canonical form:
/// x = mu + Gamma^T diag(sqrt(lambda)) Gamma z, applied in O(p + K^2).
class UBNormalSampler {
 public:
  explicit UBNormalSampler(const UBMatrix& sigma);

  Index dim() const noexcept { return form_.partition.dim(); }
  /// Sigma^{1/2} z.
  Eigen::VectorXd transform(const Eigen::VectorXd& z) const;
  Eigen::VectorXd draw(RandomStream& rng, const Eigen::VectorXd& mu) const;

 private:
  SpectralForm form_;
  Eigen::VectorXd root_;
};

/// n rows from stream (seed, dataset, index).
Dataset sample_ub_normal(const UBMatrix& sigma, const Eigen::VectorXd& mu,
                         Index n, std::uint64_t seed, std::uint64_t index = 0);

/// Group m gets group_sizes[m] rows with mean group_means[m], labelled m + 1.
Dataset sample_ub_normal_groups(const UBMatrix& sigma,
                                const std::vector<Eigen::VectorXd>& group_means,
                                const std::vector<Index>& group_sizes,
                                std::uint64_t seed, std::uint64_t index = 0);

/// The same draws through the dense Cholesky factor of expand(sigma); the
/// standard normal stream matches sample_ub_normal for equal (seed, index).
Dataset sample_dense_normal(const UBMatrix& sigma, const Eigen::VectorXd& mu,
                            Index n, std::uint64_t seed, std::uint64_t index = 0);

enum class PlanKind { one_sample, m_sample };

struct SimulationPlan {
  PlanKind kind = PlanKind::one_sample;
  UBMatrix sigma;
  /// One-sample: mu (size 1). M-sample: one mean per group.
  std::vector<Eigen::VectorXd> means{};
  /// One-sample: {n}. M-sample: group sizes.
  std::vector<Index> sizes{};
  /// Hypothesized mean for one-sample plans.
  Eigen::VectorXd mu0{};
  std::int64_t replicates = 1000;
  std::uint64_t seed = 1;
  double alpha = 0.05;
  /// Draws used for the Monte Carlo critical value and power prediction.
  std::int64_t law_replicates = 200000;
  Method method = Method::monte_carlo;
  int threads = 0;
  EstimationOptions estimation{};

  Index total_n() const;
  void validate() const;
};

struct StudyResult {
  double rate;
  double standard_error;
  double ci_low;
  double ci_high;
  double critical_value;
  std::int64_t replicates;
  /// Replicates whose estimate was not positive definite; excluded from rate.
  std::int64_t failures;
  /// Per-replicate statistics (NaN for failures).
  std::vector<double> statistics;
};

struct PowerResult {
  StudyResult empirical;
  double predicted;
  double predicted_standard_error;
  /// One-sample plans: delta_1..delta_{K+1}.
  Eigen::VectorXd noncentrality;
  FMixture alternative;
};

/// Null critical value of the plan's test at plan.alpha.
double plan_critical_value(const SimulationPlan& plan);

/// Rejection rate across replicates; replicate r simulates with stream
/// (seed, dataset, r).
StudyResult run_rejection_study(const SimulationPlan& plan);

/// run_rejection_study for a plan under the null hypothesis.
StudyResult run_type1_study(const SimulationPlan& plan);

/// Empirical power alongside the tail probability of the noncentral law at
/// the null critical value.
PowerResult run_power_study(const SimulationPlan& plan);

}  // namespace ubmat
