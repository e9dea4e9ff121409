#include "ubmat/inference.hpp"

#include "ubmat/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace ubmat {

namespace {

// Sigma_y = A P^{-1} + B, the covariance of the block averages.
Eigen::MatrixXd block_average_covariance(const UBMatrix& sigma) {
  Eigen::MatrixXd s = sigma.b();
  const Eigen::VectorXd p = sigma.partition().sizes_vector();
  for (Index k = 0; k < sigma.blocks(); ++k) s(k, k) += sigma.a()(k) / p(k);
  return s;
}

Eigen::VectorXd block_means(const Partition& partition, const Eigen::VectorXd& v) {
  return block_sums(partition, v).cwiseQuotient(partition.sizes_vector());
}

double centered_norm_sq(const Partition& partition, const Eigen::VectorXd& v,
                        Index k) {
  const auto seg = v.segment(partition.offset(k), partition.size(k));
  return (seg.array() - seg.mean()).square().sum();
}

struct WeightedDeviation {
  double weight;
  Eigen::VectorXd deviation;
};

Statistic evaluate_statistic(const FittedModel& fit,
                             const std::vector<WeightedDeviation>& terms) {
  const Partition& partition = fit.sigma.partition();
  const Index k_blocks = partition.blocks();
  const Eigen::LDLT<Eigen::MatrixXd> sigma_y(block_average_covariance(fit.sigma));
  Statistic out{0.0, Eigen::VectorXd::Zero(k_blocks + 1), fit.moments.n,
                fit.moments.groups};
  for (const WeightedDeviation& t : terms) {
    out.value += t.weight * quadratic_form(fit.theta, t.deviation);
    for (Index k = 0; k < k_blocks; ++k) {
      out.components(k) +=
          t.weight * centered_norm_sq(partition, t.deviation, k) / fit.sigma.a()(k);
    }
    const Eigen::VectorXd y = block_means(partition, t.deviation);
    out.components(k_blocks) += t.weight * y.dot(sigma_y.solve(y));
  }
  return out;
}

void require_length(const Eigen::VectorXd& v, Index p, const char* name) {
  if (v.size() != p) {
    throw InvalidInput(std::string(name) + " has length " + std::to_string(v.size()) +
                       ", expected " + std::to_string(p));
  }
}

}  // namespace

FittedModel fit_model(const Dataset& d, const EstimationOptions& options) {
  SampleMoments moments = sample_moments(d);
  UBMatrix sigma = estimate_coordinates(moments, d.partition(), options);
  UBMatrix theta = estimate_precision(sigma);
  return {std::move(moments), std::move(sigma), std::move(theta)};
}

Statistic one_sample_statistic(const FittedModel& fit, const Eigen::VectorXd& mu0) {
  require_length(mu0, fit.sigma.dim(), "mu0");
  return evaluate_statistic(
      fit, {{static_cast<double>(fit.moments.n), fit.moments.mean - mu0}});
}

Statistic one_sample_statistic(const Dataset& d, const Eigen::VectorXd& mu0,
                               const EstimationOptions& options) {
  if (d.grouped() && d.groups() > 1) {
    throw InvalidInput("one-sample statistic expects an ungrouped dataset");
  }
  return one_sample_statistic(fit_model(d, options), mu0);
}

Statistic m_sample_statistic(const FittedModel& fit) {
  if (fit.moments.groups < 2) {
    throw InvalidInput("M-sample statistic needs at least 2 groups");
  }
  std::vector<WeightedDeviation> terms;
  for (std::size_t m = 0; m < fit.moments.group_means.size(); ++m) {
    terms.push_back({static_cast<double>(fit.moments.group_sizes[m]),
                     fit.moments.group_means[m] - fit.moments.mean});
  }
  return evaluate_statistic(fit, terms);
}

Statistic m_sample_statistic(const Dataset& d, const EstimationOptions& options) {
  if (d.groups() < 2) throw InvalidInput("M-sample statistic needs at least 2 groups");
  const Index k = d.partition().blocks();
  if (d.rows() <= std::max<Index>(d.groups(), k + k * (k + 1) / 2) &&
      !options.allow_small_n) {
    throw DomainError("n must exceed max(M, K + K(K+1)/2)");
  }
  return m_sample_statistic(fit_model(d, options));
}

double two_sample_statistic(const FittedModel& fit) {
  if (fit.moments.groups != 2) throw InvalidInput("two-sample form needs M = 2");
  const double n1 = static_cast<double>(fit.moments.group_sizes[0]);
  const double n2 = static_cast<double>(fit.moments.group_sizes[1]);
  const Eigen::VectorXd diff = fit.moments.group_means[0] - fit.moments.group_means[1];
  return n1 * n2 / (n1 + n2) * quadratic_form(fit.theta, diff);
}

FMixture one_sample_law(const Partition& partition, Index n,
                        const Eigen::VectorXd& noncentrality) {
  const Index k_blocks = partition.blocks();
  if (n <= k_blocks) {
    throw DomainError("one-sample law needs n > K (n = " + std::to_string(n) +
                      ", K = " + std::to_string(k_blocks) + ")");
  }
  if (noncentrality.size() != k_blocks + 1) {
    throw InvalidInput("expected K + 1 noncentrality parameters");
  }
  FMixture law;
  const double nd = static_cast<double>(n);
  for (Index k = 0; k < k_blocks; ++k) {
    const double q = static_cast<double>(partition.size(k) - 1);
    law.terms.push_back({q, q, q * (nd - 1.0), noncentrality(k)});
  }
  const double kd = static_cast<double>(k_blocks);
  law.terms.push_back(
      {kd * (nd - 1.0) / (nd - kd), kd, nd - kd, noncentrality(k_blocks)});
  return law;
}

FMixture one_sample_null_law(const Partition& partition, Index n) {
  return one_sample_law(partition, n, Eigen::VectorXd::Zero(partition.blocks() + 1));
}

FMixture m_sample_null_law(const Partition& partition, Index n, int groups) {
  const Index k_blocks = partition.blocks();
  if (groups < 2) throw InvalidInput("M-sample law needs at least 2 groups");
  if (n - groups < k_blocks) {
    throw DomainError("M-sample law needs n - M >= K");
  }
  FMixture law;
  const double m1 = groups - 1.0;
  const double nm = static_cast<double>(n - groups);
  for (Index k = 0; k < k_blocks; ++k) {
    const double q = static_cast<double>(partition.size(k) - 1);
    law.terms.push_back({m1 * q, m1 * q, nm * q, 0.0});
  }
  law.hotelling_lawley.push_back(
      {nm, groups - 1, static_cast<int>(k_blocks), static_cast<int>(n - groups), {}});
  return law;
}

Eigen::VectorXd noncentrality_parameters(const Eigen::VectorXd& mu,
                                         const Eigen::VectorXd& mu0,
                                         const UBMatrix& sigma, Index n) {
  if (!is_positive_definite(sigma)) {
    throw DomainError("sigma must be positive definite");
  }
  require_length(mu, sigma.dim(), "mu");
  require_length(mu0, sigma.dim(), "mu0");
  const Partition& partition = sigma.partition();
  const Index k_blocks = partition.blocks();
  const Eigen::VectorXd d = mu - mu0;
  const double nd = static_cast<double>(n);
  Eigen::VectorXd delta(k_blocks + 1);
  for (Index k = 0; k < k_blocks; ++k) {
    delta(k) = 0.5 * nd * centered_norm_sq(partition, d, k) / sigma.a()(k);
  }
  const Eigen::VectorXd y = block_means(partition, d);
  delta(k_blocks) =
      0.5 * nd * y.dot(block_average_covariance(sigma).ldlt().solve(y));
  return delta;
}

FMixture m_sample_law(const UBMatrix& sigma,
                      const std::vector<Eigen::VectorXd>& group_means,
                      const std::vector<Index>& group_sizes) {
  if (group_means.size() != group_sizes.size()) {
    throw InvalidInput("one group size per group mean is required");
  }
  if (!is_positive_definite(sigma)) {
    throw DomainError("sigma must be positive definite");
  }
  const Partition& partition = sigma.partition();
  const Index k_blocks = partition.blocks();
  const int groups = static_cast<int>(group_sizes.size());
  Index n = 0;
  Eigen::VectorXd grand = Eigen::VectorXd::Zero(sigma.dim());
  for (int m = 0; m < groups; ++m) {
    require_length(group_means[static_cast<std::size_t>(m)], sigma.dim(), "group mean");
    n += group_sizes[static_cast<std::size_t>(m)];
    grand += static_cast<double>(group_sizes[static_cast<std::size_t>(m)]) *
             group_means[static_cast<std::size_t>(m)];
  }
  grand /= static_cast<double>(n);
  FMixture law = m_sample_null_law(partition, n, groups);

  Eigen::MatrixXd between = Eigen::MatrixXd::Zero(k_blocks, k_blocks);
  for (int m = 0; m < groups; ++m) {
    const double w = static_cast<double>(group_sizes[static_cast<std::size_t>(m)]);
    const Eigen::VectorXd d = group_means[static_cast<std::size_t>(m)] - grand;
    for (Index k = 0; k < k_blocks; ++k) {
      law.terms[static_cast<std::size_t>(k)].noncentrality +=
          0.5 * w * centered_norm_sq(partition, d, k) / sigma.a()(k);
    }
    const Eigen::VectorXd y = block_means(partition, d);
    between += w * y * y.transpose();
  }
  const Eigen::LLT<Eigen::MatrixXd> chol(block_average_covariance(sigma));
  const Eigen::MatrixXd l = chol.matrixL();
  const Eigen::MatrixXd half = l.triangularView<Eigen::Lower>().solve(between);
  const Eigen::MatrixXd whitened =
      l.triangularView<Eigen::Lower>().solve(half.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (whitened + whitened.transpose()), Eigen::EigenvaluesOnly);
  HotellingLawleyTerm& h = law.hotelling_lawley.front();
  const Index rank = std::min<Index>(groups - 1, k_blocks);
  for (Index j = 0; j < rank; ++j) {
    h.shift.push_back(std::max(0.0, eig.eigenvalues()(k_blocks - 1 - j)));
  }
  if (std::all_of(h.shift.begin(), h.shift.end(), [](double s) { return s == 0.0; })) {
    h.shift.clear();
  }
  return law;
}

std::string to_string(Method m) {
  return m == Method::monte_carlo ? "mc" : "morrison";
}

Method parse_method(const std::string& text) {
  if (text == "mc") return Method::monte_carlo;
  if (text == "morrison") return Method::morrison;
  throw InvalidInput("unknown method '" + text + "' (expected mc or morrison)");
}

TestReport evaluate_test(const std::string& test, const Statistic& stat,
                         const Partition& partition, const FMixture& law,
                         const TestOptions& options) {
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    throw InvalidInput("alpha must lie strictly between 0 and 1");
  }
  TestReport r{test, stat.value, stat.components, 0.0, 0.0, options.alpha, false,
               options.method, 0, 0, std::nullopt, std::nullopt, law, stat.n,
               stat.groups, partition};
  if (options.method == Method::monte_carlo) {
    const EmpiricalDistribution dist(
        mixture_sample(law, options.replicates, options.seed, options.threads));
    r.quantile = dist.upper_quantile(options.alpha);
    r.critical_value = r.quantile->value;
    r.p_value = dist.p_value(stat.value);
    r.replicates = options.replicates;
    r.seed = options.seed;
  } else {
    r.morrison = morrison_approximation(law);
    r.critical_value = r.morrison->upper_quantile(options.alpha);
    r.p_value = r.morrison->p_value(stat.value);
  }
  r.reject = stat.value > r.critical_value;
  return r;
}

TestReport one_sample_test(const Dataset& d, const Eigen::VectorXd& mu0,
                           const TestOptions& options) {
  const Statistic stat = one_sample_statistic(d, mu0, options.estimation);
  return evaluate_test("one_sample", stat, d.partition(),
                       one_sample_null_law(d.partition(), d.rows()), options);
}

TestReport m_sample_test(const Dataset& d, const TestOptions& options) {
  const Statistic stat = m_sample_statistic(d, options.estimation);
  return evaluate_test("m_sample", stat, d.partition(),
                       m_sample_null_law(d.partition(), d.rows(), d.groups()),
                       options);
}

ConfidenceInterval simultaneous_ci(const FittedModel& fit, const Eigen::VectorXd& a,
                                   double critical_value) {
  require_length(a, fit.sigma.dim(), "a");
  const double center = a.dot(fit.moments.mean);
  const double half = std::sqrt(critical_value * quadratic_form(fit.sigma, a) /
                                static_cast<double>(fit.moments.n));
  return {center - half, center + half, center, half};
}

ConfidenceInterval simultaneous_ci(const Dataset& d, const Eigen::VectorXd& a,
                                   const TestOptions& options) {
  const FittedModel fit = fit_model(d, options.estimation);
  const FMixture law = one_sample_null_law(d.partition(), d.rows());
  double q = 0.0;
  if (options.method == Method::monte_carlo) {
    q = mixture_quantile(law, options.alpha, options.replicates, options.seed,
                         options.threads)
            .value;
  } else {
    q = morrison_approximation(law).upper_quantile(options.alpha);
  }
  return simultaneous_ci(fit, a, q);
}

}  // namespace ubmat
