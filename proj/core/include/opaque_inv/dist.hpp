#pragma once

#include <cstdint>

namespace opaque_inv::dist {

/// Seed-reproducible random stream (PCG32). Identical (seed, stream_id)
/// pairs produce identical sequences on every platform; distinct stream_ids
/// from one seed give statistically independent substreams.
///
/// A stream is single-owner mutable state: parallel code uses one stream per
/// worker/replication, never a shared instance.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
  std::uint64_t seed_;
  std::uint64_t stream_id_;
};

/// P(Y = k) for Y ~ Poisson(gamma), evaluated in log space so that k up to
/// 1e5 and beyond stays finite. Throws std::domain_error for gamma < 0 or
/// k < 0.
double poisson_pmf(double gamma, std::int64_t k);

/// P(Y <= k) for Y ~ Poisson(gamma) via the regularized incomplete gamma
/// function. k < 0 returns 0. Throws std::domain_error for gamma < 0.
double poisson_cdf(double gamma, std::int64_t k);

/// Exact Poisson(gamma) variate: sequential-search inversion for small
/// rates, transformed rejection (PTRS) above. No normal approximation at
/// any rate.
std::int64_t sample_poisson(RandomStream& stream, double gamma);

/// Exact Binomial(trials, prob) variate by single-uniform inversion, with a
/// Bernoulli-sum fallback when the inversion seed term underflows.
std::int64_t sample_binomial(RandomStream& stream, std::int64_t trials,
                             double prob);

double std_normal_pdf(double x);
double std_normal_cdf(double x);

/// Conditional moments of T ~ Normal(mu_t, sigma_t^2) given T > 0.
/// When the truncation is too deep to evaluate stably (alpha = -mu_t/sigma_t
/// above 8), `defined` is false, prob_positive is 0 and mean/variance are
/// NaN.
struct TruncatedNormalMoments {
  double mean;
  double variance;
  double prob_positive;
  bool defined;
};

TruncatedNormalMoments truncated_normal_moments(double mu_t, double sigma_t);

}  // namespace opaque_inv::dist
