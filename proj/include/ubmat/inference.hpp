#pragma once

#include "ubmat/estimation.hpp"
#include "ubmat/mixture.hpp"
#include "ubmat/ub_matrix.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ubmat {

/// Value of an information statistic and its K + 1 additive components: the
/// within-block terms F_1..F_K and the block-average Hotelling term F_{K+1}.
struct Statistic {
  double value;
  Eigen::VectorXd components;
  Index n;
  int groups;
};

/// Plug-in estimates backing a statistic.
struct FittedModel {
  SampleMoments moments;
  UBMatrix sigma;
  UBMatrix theta;
};

FittedModel fit_model(const Dataset& d, const EstimationOptions& options = {});

/// U = n (xbar - mu0)^T Theta (xbar - mu0), evaluated in coordinates.
Statistic one_sample_statistic(const FittedModel& fit,
                               const Eigen::VectorXd& mu0);
Statistic one_sample_statistic(const Dataset& d, const Eigen::VectorXd& mu0,
                               const EstimationOptions& options = {});

/// U_M = sum_m n_m (xbar_m - xbar)^T Theta (xbar_m - xbar) with Theta the
/// pooled precision estimate.
Statistic m_sample_statistic(const FittedModel& fit);
Statistic m_sample_statistic(const Dataset& d,
                             const EstimationOptions& options = {});

/// (n1 n2 / n) (xbar_1 - xbar_2)^T Theta (xbar_1 - xbar_2); requires M = 2.
double two_sample_statistic(const FittedModel& fit);

/// Terms (p_k - 1) F(p_k - 1, (p_k - 1)(n - 1)) and K(n-1)/(n-K) F(K, n - K).
FMixture one_sample_null_law(const Partition& partition, Index n);

/// Terms (M-1)(p_k-1) F((M-1)(p_k-1), (n-M)(p_k-1)) plus
/// (n - M) tr(H E^{-1}), H ~ W_K(M - 1, I), E ~ W_K(n - M, I).
FMixture m_sample_null_law(const Partition& partition, Index n, int groups);

/// delta_k = n/2 d_k^T (a_kk^{-1} I - a_kk^{-1} p_k^{-1} J) d_k and
/// delta_{K+1} = n/2 (mu_y - nu0)^T Sigma_y^{-1} (mu_y - nu0) with
/// d = mu - mu0 and Sigma_y = A P^{-1} + B.
Eigen::VectorXd noncentrality_parameters(const Eigen::VectorXd& mu,
                                         const Eigen::VectorXd& mu0,
                                         const UBMatrix& sigma, Index n);

FMixture one_sample_law(const Partition& partition, Index n,
                        const Eigen::VectorXd& noncentrality);

/// M-sample law under group means mu_m with group sizes n_m.
FMixture m_sample_law(const UBMatrix& sigma,
                      const std::vector<Eigen::VectorXd>& group_means,
                      const std::vector<Index>& group_sizes);

enum class Method { monte_carlo, morrison };

std::string to_string(Method m);
Method parse_method(const std::string& text);

struct TestOptions {
  double alpha = 0.05;
  Method method = Method::monte_carlo;
  std::int64_t replicates = 100000;
  std::uint64_t seed = 1;
  int threads = 0;
  EstimationOptions estimation;
};

struct TestReport {
  std::string test;  // "one_sample" or "m_sample"
  double statistic;
  Eigen::VectorXd components;
  double p_value;
  double critical_value;
  double alpha;
  bool reject;
  Method method;
  std::int64_t replicates = 0;
  std::uint64_t seed = 0;
  /// Monte Carlo only.
  std::optional<QuantileEstimate> quantile;
  /// Morrison only.
  std::optional<MorrisonFit> morrison;
  FMixture law;
  Index n;
  int groups;
  Partition partition;
};

TestReport one_sample_test(const Dataset& d, const Eigen::VectorXd& mu0,
                           const TestOptions& options = {});
TestReport m_sample_test(const Dataset& d, const TestOptions& options = {});

/// Evaluates a statistic against a law by the requested method.
TestReport evaluate_test(const std::string& test, const Statistic& stat,
                         const Partition& partition, const FMixture& law,
                         const TestOptions& options);

struct ConfidenceInterval {
  double low;
  double high;
  double center;
  double half_width;
};

/// a^T xbar +- sqrt(q a^T Sigma a / n) for the one-sample critical value q.
ConfidenceInterval simultaneous_ci(const FittedModel& fit,
                                   const Eigen::VectorXd& a,
                                   double critical_value);
ConfidenceInterval simultaneous_ci(const Dataset& d, const Eigen::VectorXd& a,
                                   const TestOptions& options = {});

}  // namespace ubmat
