#include "opaque_inv/dist.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace opaque_inv::dist {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
constexpr double kSqrt1_2 = 0.7071067811865475244008444;

// exp(-x + a*log(x) - lgamma(a)) with the exponent carried in long double;
// in plain double the ~1e5-magnitude terms at a ~ 1e4 cancel down to only
// ~1e-11 relative accuracy.
double gamma_prefactor(double a, double x) {
  const long double exponent = -static_cast<long double>(x) +
                               static_cast<long double>(a) * std::log(static_cast<long double>(x)) -
                               std::lgamma(static_cast<long double>(a));
  return static_cast<double>(std::exp(exponent));
}

// Regularized lower incomplete gamma P(a,x) by series expansion (x < a+1).
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 10000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * gamma_prefactor(a, x);
}

// Regularized upper incomplete gamma Q(a,x) by modified Lentz continued
// fraction (x >= a+1).
double gamma_q_contfrac(double a, double x) {
  constexpr double fpmin = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return gamma_prefactor(a, x) * h;
}

// Q(a,x) = 1 - P(a,x), regularized upper incomplete gamma, a > 0, x >= 0.
double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_contfrac(a, x);
}

// Sequential-search inversion; exact for moderate rates where exp(-gamma)
// is representable.
std::int64_t sample_poisson_inversion(RandomStream& stream, double gamma) {
  const double u = stream.next_double();
  double p = std::exp(-gamma);
  double cdf = p;
  std::int64_t k = 0;
  // u < 1, so the loop terminates; the cap guards against a stalled
  // accumulation in the extreme tail.
  const std::int64_t cap =
      static_cast<std::int64_t>(gamma + 120.0 * std::sqrt(gamma) + 200.0);
  while (u > cdf && k < cap) {
    ++k;
    p *= gamma / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

// Transformed rejection with squeeze (Hoermann's PTRS), exact for
// gamma >= 10; used here above the inversion threshold. The acceptance test
// compares against the exact log-pmf.
std::int64_t sample_poisson_ptrs(RandomStream& stream, double gamma) {
  const double smu = std::sqrt(gamma);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_gamma = std::log(gamma);

  for (;;) {
    double u;
    double v = stream.next_double();
    if (v <= 0.86 * v_r) {
      u = v / v_r - 0.43;
      const double us = 0.5 - std::abs(u);
      return static_cast<std::int64_t>(
          std::floor((2.0 * a / us + b) * u + gamma + 0.445));
    }
    if (v >= v_r) {
      u = stream.next_double() - 0.5;
    } else {
      u = v / v_r - 0.93;
      u = (u < 0.0 ? -0.5 : 0.5) - u;
      v = stream.next_double() * v_r;
    }
    const double us = 0.5 - std::abs(u);
    if (us < 0.013 && v > us) continue;
    const double kf = std::floor((2.0 * a / us + b) * u + gamma + 0.445);
    if (kf < 0.0) continue;
    v = v * inv_alpha / (a / (us * us) + b);
    if (std::log(v) <= kf * log_gamma - gamma - std::lgamma(kf + 1.0)) {
      return static_cast<std::int64_t>(kf);
    }
  }
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : state_(0), inc_((stream_id << 1u) | 1u), seed_(seed),
      stream_id_(stream_id) {
  next_u32();
  state_ += seed;
  next_u32();
}

std::uint32_t RandomStream::next_u32() {
  const std::uint64_t old = state_;
  state_ = old * 6364136223846793005ULL + inc_;
  const auto xorshifted =
      static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
  const auto rot = static_cast<std::uint32_t>(old >> 59u);
  return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t hi = next_u32();
  return (hi << 32) | next_u32();
}

double RandomStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double poisson_pmf(double gamma, std::int64_t k) {
  if (!(gamma >= 0.0)) throw std::domain_error("poisson_pmf: gamma < 0");
  if (k < 0) throw std::domain_error("poisson_pmf: k < 0");
  if (gamma == 0.0) return k == 0 ? 1.0 : 0.0;
  const long double kd = static_cast<long double>(k);
  const long double logp = kd * std::log(static_cast<long double>(gamma)) -
                           static_cast<long double>(gamma) -
                           std::lgamma(kd + 1.0L);
  return std::min(1.0, static_cast<double>(std::exp(logp)));
}

double poisson_cdf(double gamma, std::int64_t k) {
  if (!(gamma >= 0.0)) throw std::domain_error("poisson_cdf: gamma < 0");
  if (k < 0) return 0.0;
  if (gamma == 0.0) return 1.0;
  // k = 0 bit-matches the pmf so that expressions like
  // (c - mu)*F(0) + mu*P(0) cancel exactly.
  if (k == 0) return std::exp(-gamma);
  return gamma_q(static_cast<double>(k) + 1.0, gamma);
}

std::int64_t sample_poisson(RandomStream& stream, double gamma) {
  if (!(gamma >= 0.0)) throw std::domain_error("sample_poisson: gamma < 0");
  if (gamma == 0.0) return 0;
  if (gamma < 30.0) return sample_poisson_inversion(stream, gamma);
  return sample_poisson_ptrs(stream, gamma);
}

std::int64_t sample_binomial(RandomStream& stream, std::int64_t trials,
                             double prob) {
  if (trials < 0) throw std::domain_error("sample_binomial: trials < 0");
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw std::domain_error("sample_binomial: prob outside [0,1]");
  }
  if (trials == 0 || prob == 0.0) return 0;
  if (prob == 1.0) return trials;

  const bool flipped = prob > 0.5;
  const double p = flipped ? 1.0 - prob : prob;
  const double q = 1.0 - p;
  const double nd = static_cast<double>(trials);

  std::int64_t k = 0;
  double f = std::exp(nd * std::log(q));
  if (f > 0.0) {
    // BINV: one uniform, walk the CDF.
    const double s = p / q;
    const double u = stream.next_double();
    double cdf = f;
    while (u > cdf && k < trials) {
      ++k;
      f *= s * (nd - static_cast<double>(k) + 1.0) / static_cast<double>(k);
      cdf += f;
    }
  } else {
    // q^n underflowed (only at very large trial counts): exact Bernoulli sum.
    for (std::int64_t i = 0; i < trials; ++i) {
      if (stream.next_double() < p) ++k;
    }
  }
  return flipped ? trials - k : k;
}

double std_normal_pdf(double x) {
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * kSqrt1_2); }

TruncatedNormalMoments truncated_normal_moments(double mu_t, double sigma_t) {
  if (!(sigma_t > 0.0)) {
    throw std::domain_error("truncated_normal_moments: sigma_t <= 0");
  }
  const double alpha = -mu_t / sigma_t;
  if (alpha > 8.0) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan, 0.0, false};
  }
  const double z = std_normal_cdf(-alpha);
  const double ratio = std_normal_pdf(alpha) / z;
  const double mean = mu_t + sigma_t * ratio;
  const double variance =
      sigma_t * sigma_t * (1.0 + alpha * ratio - ratio * ratio);
  return {mean, variance, z, true};
}

}  // namespace opaque_inv::dist
