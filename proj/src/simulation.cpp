#include "ubmat/simulation.hpp"

#include "ubmat/errors.hpp"
#include "ubmat/oracle.hpp"
#include "ubmat/parallel.hpp"

#include <cmath>
#include <limits>

namespace ubmat {

namespace {

Eigen::VectorXd standard_normal(RandomStream& rng, Index p) {
  Eigen::VectorXd z(p);
  for (Index i = 0; i < p; ++i) z(i) = rng.normal();
  return z;
}

bool means_equal(const std::vector<Eigen::VectorXd>& means) {
  for (const auto& m : means)
    if (m != means.front()) return false;
  return true;
}

StudyResult summarize(std::vector<double> stats, const std::vector<char>& rejected,
                      double critical_value) {
  std::int64_t failures = 0;
  std::int64_t hits = 0;
  for (std::size_t r = 0; r < stats.size(); ++r) {
    if (std::isnan(stats[r])) {
      ++failures;
    } else if (rejected[r]) {
      ++hits;
    }
  }
  const auto total = static_cast<std::int64_t>(stats.size());
  const std::int64_t used = total - failures;
  StudyResult out{};
  out.replicates = total;
  out.failures = failures;
  out.critical_value = critical_value;
  out.rate = used > 0 ? static_cast<double>(hits) / static_cast<double>(used) : 0.0;
  out.standard_error =
      used > 0 ? std::sqrt(out.rate * (1.0 - out.rate) / static_cast<double>(used)) : 0.0;
  out.ci_low = std::max(0.0, out.rate - 1.96 * out.standard_error);
  out.ci_high = std::min(1.0, out.rate + 1.96 * out.standard_error);
  out.statistics = std::move(stats);
  return out;
}

FMixture null_law(const SimulationPlan& plan) {
  return plan.kind == PlanKind::one_sample
             ? one_sample_null_law(plan.sigma.partition(), plan.total_n())
             : m_sample_null_law(plan.sigma.partition(), plan.total_n(),
                                 static_cast<int>(plan.sizes.size()));
}

}  // namespace

UBNormalSampler::UBNormalSampler(const UBMatrix& sigma)
    : form_(canonical_form(sigma)) {
  if (!is_positive_definite(sigma)) {
    throw DomainError("sampling covariance must be positive definite");
  }
  root_ = form_.diagonal().cwiseSqrt();
}

Eigen::VectorXd UBNormalSampler::transform(const Eigen::VectorXd& z) const {
  return form_.apply_transpose(root_.cwiseProduct(form_.apply(z)));
}

Eigen::VectorXd UBNormalSampler::draw(RandomStream& rng,
                                      const Eigen::VectorXd& mu) const {
  return mu + transform(standard_normal(rng, dim()));
}

Dataset sample_ub_normal(const UBMatrix& sigma, const Eigen::VectorXd& mu, Index n,
                         std::uint64_t seed, std::uint64_t index) {
  return sample_ub_normal_groups(sigma, {mu}, {n}, seed, index);
}

Dataset sample_ub_normal_groups(const UBMatrix& sigma,
                                const std::vector<Eigen::VectorXd>& group_means,
                                const std::vector<Index>& group_sizes,
                                std::uint64_t seed, std::uint64_t index) {
  if (group_means.size() != group_sizes.size() || group_means.empty()) {
    throw InvalidInput("one group size per group mean is required");
  }
  const UBNormalSampler sampler(sigma);
  const Index p = sigma.dim();
  Index n = 0;
  for (std::size_t m = 0; m < group_sizes.size(); ++m) {
    if (group_means[m].size() != p) throw InvalidInput("mean length differs from p");
    if (group_sizes[m] < 1) throw InvalidInput("group sizes must be positive");
    n += group_sizes[m];
  }
  RandomStream rng(seed, StreamDomain::dataset, index);
  Eigen::MatrixXd x(n, p);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(n));
  Index row = 0;
  for (std::size_t m = 0; m < group_sizes.size(); ++m) {
    for (Index i = 0; i < group_sizes[m]; ++i, ++row) {
      x.row(row) = sampler.draw(rng, group_means[m]).transpose();
      labels.push_back(static_cast<int>(m) + 1);
    }
  }
  if (group_sizes.size() == 1) return Dataset(std::move(x), sigma.partition());
  return Dataset(std::move(x), sigma.partition(), std::move(labels));
}

Dataset sample_dense_normal(const UBMatrix& sigma, const Eigen::VectorXd& mu, Index n,
                            std::uint64_t seed, std::uint64_t index) {
  const auto chol = oracle::cholesky(expand(sigma));
  if (!chol) throw DomainError("sampling covariance must be positive definite");
  const Index p = sigma.dim();
  RandomStream rng(seed, StreamDomain::dataset, index);
  Eigen::MatrixXd x(n, p);
  for (Index r = 0; r < n; ++r) {
    const Eigen::VectorXd z = standard_normal(rng, p);
    for (Index i = 0; i < p; ++i) {
      double s = mu(i);
      for (Index j = 0; j <= i; ++j) s += (*chol)(i, j) * z(j);
      x(r, i) = s;
    }
  }
  return Dataset(std::move(x), sigma.partition());
}

Index SimulationPlan::total_n() const {
  Index n = 0;
  for (Index s : sizes) n += s;
  return n;
}

void SimulationPlan::validate() const {
  if (replicates < 1) throw InvalidInput("replicates must be at least 1");
  if (law_replicates < 1) throw InvalidInput("law replicates must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("alpha must lie strictly between 0 and 1");
  }
  if (!is_positive_definite(sigma)) {
    throw DomainError("plan covariance must be positive definite");
  }
  if (means.size() != sizes.size() || means.empty()) {
    throw InvalidInput("plan needs one mean per group size");
  }
  for (const auto& m : means) {
    if (m.size() != sigma.dim()) throw InvalidInput("plan mean length differs from p");
  }
  for (Index s : sizes) {
    if (s < 1) throw InvalidInput("plan group sizes must be positive");
  }
  if (kind == PlanKind::one_sample) {
    if (sizes.size() != 1) throw InvalidInput("one-sample plan takes a single n");
    if (mu0.size() != sigma.dim()) throw InvalidInput("plan mu0 length differs from p");
  } else if (sizes.size() < 2) {
    throw InvalidInput("M-sample plan needs at least 2 groups");
  }
}

double plan_critical_value(const SimulationPlan& plan) {
  const FMixture law = null_law(plan);
  if (plan.method == Method::morrison) {
    return morrison_approximation(law).upper_quantile(plan.alpha);
  }
  return EmpiricalDistribution(
             mixture_sample(law, plan.law_replicates, plan.seed, plan.threads,
                            StreamDomain::critical_value))
      .upper_quantile(plan.alpha)
      .value;
}

StudyResult run_rejection_study(const SimulationPlan& plan) {
  plan.validate();
  const double crit = plan_critical_value(plan);
  const UBNormalSampler sampler(plan.sigma);
  const Partition& partition = plan.sigma.partition();
  const Index n = plan.total_n();
  const Index p = plan.sigma.dim();
  std::vector<double> stats(static_cast<std::size_t>(plan.replicates));
  std::vector<char> rejected(stats.size(), 0);
  parallel_for(plan.replicates, plan.threads, [&](std::int64_t r) {
    RandomStream rng(plan.seed, StreamDomain::dataset, static_cast<std::uint64_t>(r));
    Eigen::MatrixXd x(n, p);
    std::vector<int> labels;
    Index row = 0;
    for (std::size_t m = 0; m < plan.sizes.size(); ++m) {
      for (Index i = 0; i < plan.sizes[m]; ++i, ++row) {
        x.row(row) = sampler.draw(rng, plan.means[m]).transpose();
        labels.push_back(static_cast<int>(m) + 1);
      }
    }
    double value = std::numeric_limits<double>::quiet_NaN();
    try {
      if (plan.kind == PlanKind::one_sample) {
        const Dataset d(std::move(x), partition);
        value = one_sample_statistic(fit_model(d, plan.estimation), plan.mu0).value;
      } else {
        const Dataset d(std::move(x), partition, std::move(labels));
        value = m_sample_statistic(fit_model(d, plan.estimation)).value;
      }
    } catch (const DomainError&) {
    } catch (const SingularError&) {
    }
    stats[static_cast<std::size_t>(r)] = value;
    rejected[static_cast<std::size_t>(r)] = value > crit;
  });
  return summarize(std::move(stats), rejected, crit);
}

StudyResult run_type1_study(const SimulationPlan& plan) {
  plan.validate();
  if (plan.kind == PlanKind::one_sample ? plan.means.front() != plan.mu0
                                        : !means_equal(plan.means)) {
    throw InvalidInput("type I study needs a plan under the null hypothesis");
  }
  return run_rejection_study(plan);
}

PowerResult run_power_study(const SimulationPlan& plan) {
  plan.validate();
  PowerResult out{run_rejection_study(plan), 0.0, 0.0, Eigen::VectorXd(), FMixture{}};
  if (plan.kind == PlanKind::one_sample) {
    out.noncentrality =
        noncentrality_parameters(plan.means.front(), plan.mu0, plan.sigma, plan.total_n());
    out.alternative =
        one_sample_law(plan.sigma.partition(), plan.total_n(), out.noncentrality);
  } else {
    out.alternative = m_sample_law(plan.sigma, plan.means, plan.sizes);
  }
  const std::vector<double> draws = mixture_sample(
      out.alternative, plan.law_replicates, plan.seed, plan.threads,
      StreamDomain::power_prediction);
  std::int64_t hits = 0;
  for (double v : draws)
    if (v > out.empirical.critical_value) ++hits;
  const double r = static_cast<double>(draws.size());
  out.predicted = static_cast<double>(hits) / r;
  out.predicted_standard_error = std::sqrt(out.predicted * (1.0 - out.predicted) / r);
  return out;
}

}  // namespace ubmat
