#include "ubmat/random.hpp"

#include "ubmat/errors.hpp"

#include <cmath>
#include <numbers>

namespace ubmat {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

std::uint64_t stream_key(std::uint64_t seed, StreamDomain domain,
                         std::uint64_t index) {
  std::uint64_t state = seed;
  std::uint64_t h = splitmix64(state);
  state = h ^ static_cast<std::uint64_t>(domain);
  h = splitmix64(state);
  state = h ^ index;
  return splitmix64(state);
}

bool is_small_integer(double df) {
  return df <= 30.0 && df == std::floor(df) && df >= 1.0;
}

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  std::uint64_t state = seed;
  for (auto& word : s_) word = splitmix64(state);
}

Xoshiro256::result_type Xoshiro256::operator()() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

RandomStream::RandomStream(std::uint64_t seed, StreamDomain domain,
                           std::uint64_t index)
    : engine_(stream_key(seed, domain, index)) {}

double RandomStream::uniform() {
  // 53 random bits, shifted half a step off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

double RandomStream::gamma(double shape) {
  if (!(shape > 0.0)) throw InvalidInput("gamma shape must be positive");
  if (shape < 1.0) {
    // G(a) = G(a + 1) U^{1/a}.
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RandomStream::chi_square(double df) {
  if (!(df > 0.0)) throw InvalidInput("chi-square df must be positive");
  if (is_small_integer(df)) {
    double s = 0.0;
    for (int i = 0; i < static_cast<int>(df); ++i) {
      const double z = normal();
      s += z * z;
    }
    return s;
  }
  return 2.0 * gamma(0.5 * df);
}

std::uint64_t RandomStream::poisson(double mean) {
  if (!(mean >= 0.0)) throw InvalidInput("Poisson mean must be nonnegative");
  // Sequential-search inversion in chunks small enough that exp(-mean) does
  // not underflow.
  constexpr double chunk = 500.0;
  std::uint64_t total = 0;
  double remaining = mean;
  while (remaining > 0.0) {
    const double m = remaining > chunk ? chunk : remaining;
    remaining -= m;
    const double u = uniform();
    double prob = std::exp(-m);
    double cdf = prob;
    std::uint64_t k = 0;
    while (u > cdf && prob > 0.0) {
      ++k;
      prob *= m / static_cast<double>(k);
      cdf += prob;
    }
    total += k;
  }
  return total;
}

double RandomStream::noncentral_chi_square(double df, double delta) {
  if (delta == 0.0) return chi_square(df);
  if (delta < 0.0) throw InvalidInput("noncentrality must be nonnegative");
  const std::uint64_t j = poisson(delta);
  return chi_square(df + 2.0 * static_cast<double>(j));
}

double RandomStream::f(double df1, double df2, double delta) {
  const double num = noncentral_chi_square(df1, delta) / df1;
  const double den = chi_square(df2) / df2;
  return num / den;
}

}  // namespace ubmat
