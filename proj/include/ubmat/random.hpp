#pragma once

#include <cstdint>
#include <limits>

namespace ubmat {

/// xoshiro256** seeded through SplitMix64.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()();

 private:
  std::uint64_t s_[4];
};

/// Tags separating independent uses of one user seed.
enum class StreamDomain : std::uint64_t {
  dataset = 1,
  mixture = 2,
  critical_value = 3,
  power_prediction = 4,
};

/// A reproducible random stream identified by (seed, domain, index).
///
/// Replicate r of a Monte Carlo run draws from stream (seed, domain, r), so
/// its values do not depend on how replicates are spread across threads.
///
/// Normals use the Box-Muller pair method. Chi-square variates with integer
/// df <= 30 are sums of squared normals; any other df uses the
/// Marsaglia-Tsang gamma method. A noncentral chi-square with
/// noncentrality delta (the half-sum-of-squares convention, so a Poisson
/// mixture with mean delta) mixes central chi-squares over Poisson counts.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, StreamDomain domain, std::uint64_t index);

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double gamma(double shape);
  double chi_square(double df);
  double noncentral_chi_square(double df, double delta);
  std::uint64_t poisson(double mean);
  /// (chi2(df1, delta) / df1) / (chi2(df2) / df2).
  double f(double df1, double df2, double delta = 0.0);

 private:
  Xoshiro256 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ubmat
