#pragma once

#include "ubmat/random.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace ubmat {

/// coefficient * F(df1, df2; noncentrality). The noncentrality follows the
/// half-sum-of-squares convention: the numerator chi-square is a Poisson
/// mixture with mean `noncentrality`.
struct FTerm {
  double coefficient;
  double df1;
  double df2;
  double noncentrality = 0.0;
};

/// coefficient * tr(H E^{-1}) with H ~ W_d(q, I) and E ~ W_d(nu, I)
/// independent. `shift` holds the eigenvalues of the noncentrality matrix of
/// H (sum of squared means, length <= d); empty for the central law.
struct HotellingLawleyTerm {
  double coefficient;
  int q;
  int d;
  int nu;
  std::vector<double> shift;
};

/// A law of sum_j c_j F_j + sum_h c_h T_h with independent components.
struct FMixture {
  std::vector<FTerm> terms;
  std::vector<HotellingLawleyTerm> hotelling_lawley;

  bool central() const;
};

/// Moments, when finite. Throws DomainError otherwise, or for a noncentral
/// law.
double mixture_mean(const FMixture& law);
double mixture_variance(const FMixture& law);

/// R independent draws. Draw r uses stream (seed, domain, r), so the result
/// depends only on (law, R, seed, domain).
std::vector<double> mixture_sample(const FMixture& law, std::int64_t replicates,
                                   std::uint64_t seed, int threads = 0,
                                   StreamDomain domain = StreamDomain::mixture);

struct QuantileEstimate {
  double value;
  /// Order statistics bracketing the quantile at +-1.96 binomial SE.
  double lower;
  double upper;
  double standard_error;
};

/// Sorted Monte Carlo sample of a law.
class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(std::vector<double> sample);

  std::int64_t size() const noexcept {
    return static_cast<std::int64_t>(sorted_.size());
  }
  const std::vector<double>& sorted() const noexcept { return sorted_; }

  /// Upper-alpha quantile: order statistic ceil((1 - alpha) R).
  QuantileEstimate upper_quantile(double alpha) const;
  /// (#{draws >= observed} + 1) / (R + 1).
  double p_value(double observed) const;
  double mean() const;
  double variance() const;

 private:
  std::vector<double> sorted_;
};

QuantileEstimate mixture_quantile(const FMixture& law, double alpha,
                                  std::int64_t replicates, std::uint64_t seed,
                                  int threads = 0);

double p_value(const FMixture& law, double observed, std::int64_t replicates,
               std::uint64_t seed, int threads = 0);

/// C1 * F(df1, C2) with the first two moments of a central law, where df1 is
/// the summed numerator degrees of freedom.
struct MorrisonFit {
  double c1;
  double c2;
  double df1;

  double mean() const;
  double variance() const;
  double upper_quantile(double alpha) const;
  double p_value(double observed) const;
};

/// Throws DomainError when some df2 <= 4 (or a Hotelling-Lawley term has
/// nu - d - 3 <= 0), when the law is noncentral, or when the moments admit no
/// solution.
MorrisonFit morrison_approximation(const FMixture& law);

/// Upper-alpha quantile and tail probability of F(d1, d2).
double f_upper_quantile(double d1, double d2, double alpha);
double f_upper_tail(double d1, double d2, double x);

}  // namespace ubmat
