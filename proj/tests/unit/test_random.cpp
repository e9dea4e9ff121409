#include "ubmat/errors.hpp"
#include "ubmat/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace {

using ubmat::RandomStream;
using ubmat::StreamDomain;

struct Moments {
  double mean;
  double var;
};

template <typename F>
Moments moments(int n, F&& draw) {
  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = draw();
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  return {mean, (s2 - n * mean * mean) / (n - 1)};
}

TEST(RandomStream, Reproducible) {
  RandomStream a(42, StreamDomain::dataset, 7);
  RandomStream b(42, StreamDomain::dataset, 7);
  RandomStream c(42, StreamDomain::dataset, 8);
  RandomStream d(42, StreamDomain::mixture, 7);
  bool differs_c = false;
  bool differs_d = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    EXPECT_EQ(x, b.normal());
    differs_c |= x != c.normal();
    differs_d |= x != d.normal();
  }
  EXPECT_TRUE(differs_c);
  EXPECT_TRUE(differs_d);
}

TEST(RandomStream, UniformOpenInterval) {
  RandomStream r(1, StreamDomain::dataset, 0);
  const int n = 200000;
  const Moments m = moments(n, [&] {
    const double u = r.uniform();
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
    return u;
  });
  EXPECT_NEAR(m.mean, 0.5, 4 * std::sqrt(1.0 / 12 / n));
}

TEST(RandomStream, NormalMoments) {
  RandomStream r(2, StreamDomain::dataset, 0);
  const int n = 200000;
  const Moments m = moments(n, [&] { return r.normal(); });
  EXPECT_NEAR(m.mean, 0.0, 4 / std::sqrt(n));
  EXPECT_NEAR(m.var, 1.0, 4 * std::sqrt(2.0 / n));
}

TEST(RandomStream, ChiSquareBothPaths) {
  for (double df : {1.0, 3.0, 30.0, 31.0, 45.5, 0.7}) {
    RandomStream r(3, StreamDomain::dataset, static_cast<std::uint64_t>(df * 10));
    const int n = 100000;
    const Moments m = moments(n, [&] { return r.chi_square(df); });
    EXPECT_NEAR(m.mean, df, 4 * std::sqrt(2 * df / n)) << df;
    EXPECT_NEAR(m.var, 2 * df, 0.05 * 2 * df) << df;
  }
  RandomStream r(3, StreamDomain::dataset, 0);
  EXPECT_THROW(r.chi_square(0.0), ubmat::InvalidInput);
}

TEST(RandomStream, PoissonMoments) {
  for (double mean : {0.0, 0.4, 3.5, 60.0, 1200.0}) {
    RandomStream r(4, StreamDomain::dataset, static_cast<std::uint64_t>(mean));
    const int n = 50000;
    const Moments m = moments(n, [&] { return static_cast<double>(r.poisson(mean)); });
    EXPECT_NEAR(m.mean, mean, 4 * std::sqrt(mean / n) + 1e-12) << mean;
    if (mean > 0) EXPECT_NEAR(m.var, mean, 0.05 * mean) << mean;
  }
}

TEST(RandomStream, NoncentralChiSquareMoments) {
  // delta is half the usual noncentrality lambda.
  const double df = 4.0;
  const double delta = 2.5;
  const double lambda = 2 * delta;
  RandomStream r(5, StreamDomain::dataset, 0);
  const int n = 200000;
  const Moments m = moments(n, [&] { return r.noncentral_chi_square(df, delta); });
  EXPECT_NEAR(m.mean, df + lambda, 4 * std::sqrt(2 * (df + 2 * lambda) / n));
  EXPECT_NEAR(m.var, 2 * (df + 2 * lambda), 0.03 * 2 * (df + 2 * lambda));
}

TEST(RandomStream, FMean) {
  RandomStream r(6, StreamDomain::dataset, 0);
  const int n = 200000;
  const Moments m = moments(n, [&] { return r.f(5.0, 40.0); });
  EXPECT_NEAR(m.mean, 40.0 / 38.0, 4 * std::sqrt(m.var / n));
}

}  // namespace
