#include "ubmat/mixture.hpp"

#include "ubmat/errors.hpp"
#include "ubmat/parallel.hpp"
#include "ubmat/random.hpp"

#include <boost/math/distributions/fisher_f.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ubmat {

namespace {

void validate(const FMixture& law) {
  for (const FTerm& t : law.terms) {
    if (!(t.df1 > 0.0) || !(t.df2 > 0.0)) {
      throw InvalidInput("F term degrees of freedom must be positive");
    }
    if (!(t.noncentrality >= 0.0)) {
      throw InvalidInput("F term noncentrality must be nonnegative");
    }
  }
  for (const HotellingLawleyTerm& h : law.hotelling_lawley) {
    if (h.q < 1 || h.d < 1 || h.nu < h.d) {
      throw InvalidInput("Hotelling-Lawley term needs q >= 1, d >= 1, nu >= d");
    }
    if (static_cast<int>(h.shift.size()) > h.d) {
      throw InvalidInput("Hotelling-Lawley shift has more than d entries");
    }
  }
}

// tr(H E^{-1}) via the Bartlett factor E = L L^T.
double sample_hotelling_lawley(const HotellingLawleyTerm& h, RandomStream& rng) {
  const int d = h.d;
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    l(i, i) = std::sqrt(rng.chi_square(static_cast<double>(h.nu - i)));
    for (int j = 0; j < i; ++j) l(i, j) = rng.normal();
  }
  double total = 0.0;
  Eigen::VectorXd z(d);
  for (int col = 0; col < h.q; ++col) {
    for (int i = 0; i < d; ++i) z(i) = rng.normal();
    if (static_cast<std::size_t>(col) < h.shift.size()) {
      z(col) += std::sqrt(h.shift[static_cast<std::size_t>(col)]);
    }
    for (int i = 0; i < d; ++i) {
      double s = z(i);
      for (int j = 0; j < i; ++j) s -= l(i, j) * z(j);
      z(i) = s / l(i, i);
    }
    total += z.squaredNorm();
  }
  return total;
}

struct HotellingLawleyMoments {
  double mean;
  double variance;
};

HotellingLawleyMoments hotelling_lawley_moments(const HotellingLawleyTerm& h) {
  const double q = h.q;
  const double d = h.d;
  const double nu = h.nu;
  const double m = nu - d - 1.0;
  if (!(nu - d - 3.0 > 0.0)) {
    throw DomainError("Hotelling-Lawley variance needs nu - d - 3 > 0");
  }
  const double denom = (nu - d) * m * m * (nu - d - 3.0);
  const double trace_inv_sq = (d * (2.0 + 2.0 * m) + d * (d - 1.0) * m) / denom + d / (m * m);
  const double var_trace_inv = (2.0 * d * d + 2.0 * m * d) / denom;
  const double c = h.coefficient;
  return {c * q * d / m,
          c * c * (2.0 * q * trace_inv_sq + q * q * var_trace_inv)};
}

void require_central(const FMixture& law) {
  if (!law.central()) {
    throw DomainError("moments are only available for a central law");
  }
}

}  // namespace

bool FMixture::central() const {
  for (const FTerm& t : terms)
    if (t.noncentrality != 0.0) return false;
  for (const HotellingLawleyTerm& h : hotelling_lawley)
    for (double s : h.shift)
      if (s != 0.0) return false;
  return true;
}

double mixture_mean(const FMixture& law) {
  validate(law);
  require_central(law);
  double mean = 0.0;
  for (const FTerm& t : law.terms) {
    if (!(t.df2 > 2.0)) throw DomainError("F mean needs df2 > 2");
    mean += t.coefficient * t.df2 / (t.df2 - 2.0);
  }
  for (const HotellingLawleyTerm& h : law.hotelling_lawley) {
    if (!(h.nu - h.d - 1 > 0)) throw DomainError("Hotelling-Lawley mean needs nu > d + 1");
    mean += h.coefficient * h.q * h.d / static_cast<double>(h.nu - h.d - 1);
  }
  return mean;
}

double mixture_variance(const FMixture& law) {
  validate(law);
  require_central(law);
  double var = 0.0;
  for (const FTerm& t : law.terms) {
    if (!(t.df2 > 4.0)) throw DomainError("F variance needs df2 > 4");
    const double d1 = t.df1;
    const double d2 = t.df2;
    var += t.coefficient * t.coefficient * 2.0 * d2 * d2 * (d1 + d2 - 2.0) /
           (d1 * (d2 - 2.0) * (d2 - 2.0) * (d2 - 4.0));
  }
  for (const HotellingLawleyTerm& h : law.hotelling_lawley) {
    var += hotelling_lawley_moments(h).variance;
  }
  return var;
}

std::vector<double> mixture_sample(const FMixture& law, std::int64_t replicates,
                                   std::uint64_t seed, int threads,
                                   StreamDomain domain) {
  validate(law);
  if (replicates < 1) throw InvalidInput("replicates must be at least 1");
  std::vector<double> out(static_cast<std::size_t>(replicates));
  parallel_for(replicates, threads, [&](std::int64_t r) {
    RandomStream rng(seed, domain, static_cast<std::uint64_t>(r));
    double s = 0.0;
    for (const FTerm& t : law.terms) {
      if (t.coefficient == 0.0) continue;
      s += t.coefficient * rng.f(t.df1, t.df2, t.noncentrality);
    }
    for (const HotellingLawleyTerm& h : law.hotelling_lawley) {
      if (h.coefficient == 0.0) continue;
      s += h.coefficient * sample_hotelling_lawley(h, rng);
    }
    out[static_cast<std::size_t>(r)] = s;
  });
  return out;
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> sample)
    : sorted_(std::move(sample)) {
  if (sorted_.empty()) throw InvalidInput("empty Monte Carlo sample");
  std::sort(sorted_.begin(), sorted_.end());
}

QuantileEstimate EmpiricalDistribution::upper_quantile(double alpha) const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("alpha must lie strictly between 0 and 1");
  }
  const auto r = static_cast<double>(sorted_.size());
  auto at = [&](double rank) {
    const auto idx = static_cast<std::int64_t>(std::clamp(rank, 1.0, r)) - 1;
    return sorted_[static_cast<std::size_t>(idx)];
  };
  const double rank = std::ceil((1.0 - alpha) * r);
  const double half = 1.96 * std::sqrt(r * alpha * (1.0 - alpha));
  QuantileEstimate q{at(rank), at(std::floor(rank - half)), at(std::ceil(rank + half)), 0.0};
  q.standard_error = (q.upper - q.lower) / (2.0 * 1.96);
  return q;
}

double EmpiricalDistribution::p_value(double observed) const {
  const auto first = std::lower_bound(sorted_.begin(), sorted_.end(), observed);
  const auto exceed = static_cast<double>(sorted_.end() - first);
  return (exceed + 1.0) / (static_cast<double>(sorted_.size()) + 1.0);
}

double EmpiricalDistribution::mean() const {
  return std::accumulate(sorted_.begin(), sorted_.end(), 0.0) /
         static_cast<double>(sorted_.size());
}

double EmpiricalDistribution::variance() const {
  if (sorted_.size() < 2) return 0.0;
  const double mu = mean();
  double s = 0.0;
  for (double v : sorted_) s += (v - mu) * (v - mu);
  return s / static_cast<double>(sorted_.size() - 1);
}

QuantileEstimate mixture_quantile(const FMixture& law, double alpha,
                                  std::int64_t replicates, std::uint64_t seed,
                                  int threads) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("alpha must lie strictly between 0 and 1");
  }
  return EmpiricalDistribution(mixture_sample(law, replicates, seed, threads))
      .upper_quantile(alpha);
}

double p_value(const FMixture& law, double observed, std::int64_t replicates,
               std::uint64_t seed, int threads) {
  return EmpiricalDistribution(mixture_sample(law, replicates, seed, threads))
      .p_value(observed);
}

double f_upper_quantile(double d1, double d2, double alpha) {
  boost::math::fisher_f dist(d1, d2);
  return boost::math::quantile(boost::math::complement(dist, alpha));
}

double f_upper_tail(double d1, double d2, double x) {
  if (!(x > 0.0)) return 1.0;
  boost::math::fisher_f dist(d1, d2);
  return boost::math::cdf(boost::math::complement(dist, x));
}

double MorrisonFit::mean() const { return c1 * c2 / (c2 - 2.0); }

double MorrisonFit::variance() const {
  return c1 * c1 * 2.0 * c2 * c2 * (df1 + c2 - 2.0) /
         (df1 * (c2 - 2.0) * (c2 - 2.0) * (c2 - 4.0));
}

double MorrisonFit::upper_quantile(double alpha) const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("alpha must lie strictly between 0 and 1");
  }
  return c1 * f_upper_quantile(df1, c2, alpha);
}

double MorrisonFit::p_value(double observed) const {
  return f_upper_tail(df1, c2, observed / c1);
}

MorrisonFit morrison_approximation(const FMixture& law) {
  validate(law);
  require_central(law);
  double df1 = 0.0;
  for (const FTerm& t : law.terms) {
    if (!(t.df2 > 4.0)) {
      throw DomainError("Morrison approximation needs df2 > 4 in every term");
    }
    df1 += t.df1;
  }
  for (const HotellingLawleyTerm& h : law.hotelling_lawley) {
    df1 += static_cast<double>(h.q) * h.d;
  }
  const double mean = mixture_mean(law);
  const double var = mixture_variance(law);
  if (!(mean > 0.0) || !(var > 0.0)) {
    throw DomainError("Morrison approximation needs positive mean and variance");
  }
  const double r = var / (mean * mean);
  if (!(r * df1 > 2.0)) {
    throw DomainError("Morrison approximation has no solution for this law");
  }
  const double c2 = (4.0 * r * df1 + 2.0 * df1 - 4.0) / (r * df1 - 2.0);
  const double c1 = mean * (c2 - 2.0) / c2;
  return {c1, c2, df1};
}

}  // namespace ubmat
