#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "opaque_inv/dist.hpp"
#include "oracles.hpp"

using namespace opaque_inv;

TEST_CASE("random stream matches the pcg32 reference vectors") {
  dist::RandomStream stream(42, 54);
  const std::uint32_t expected[] = {0xa15c02b7u, 0x7b47f409u, 0xba1d3330u,
                                    0x83d2f293u, 0xbfa4784bu, 0xcbed606eu};
  for (std::uint32_t value : expected) CHECK(stream.next_u32() == value);
}

TEST_CASE("random stream is reproducible and streams are distinct") {
  dist::RandomStream a(7, 3);
  dist::RandomStream b(7, 3);
  dist::RandomStream c(7, 4);
  bool distinct = false;
  for (int i = 0; i < 64; ++i) {
    const std::uint32_t va = a.next_u32();
    CHECK(va == b.next_u32());
    if (va != c.next_u32()) distinct = true;
  }
  CHECK(distinct);
  dist::RandomStream u(123, 0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.next_double();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("poisson pmf spot values and domain") {
  CHECK(dist::poisson_pmf(10.0, 0) == doctest::Approx(4.5399929762484854e-05).epsilon(1e-12));
  CHECK(dist::poisson_pmf(0.0, 0) == 1.0);
  CHECK(dist::poisson_pmf(0.0, 3) == 0.0);
  CHECK(dist::poisson_pmf(10.0, 15) ==
        doctest::Approx(0.034718069630684245).epsilon(1e-12));
  // huge k stays finite in log space
  const double tiny = dist::poisson_pmf(10.0, 100000);
  CHECK(std::isfinite(tiny));
  CHECK(tiny >= 0.0);
  CHECK(tiny <= 1.0);
  CHECK_THROWS_AS(dist::poisson_pmf(-1.0, 0), std::domain_error);
  CHECK_THROWS_AS(dist::poisson_pmf(10.0, -1), std::domain_error);
}

TEST_CASE("poisson pmf agrees with the recurrence route") {
  for (double gamma : {4.0, 10.0, 20.0, 40.0, 120.0}) {
    const auto kmax = oracles::poisson_tail_cut(gamma);
    const auto table = oracles::poisson_pmf_table(gamma, kmax);
    double total = 0.0;
    for (std::int64_t k = 0; k <= kmax; ++k) {
      CHECK(dist::poisson_pmf(gamma, k) ==
            doctest::Approx(table[static_cast<std::size_t>(k)]).epsilon(1e-11));
      total += dist::poisson_pmf(gamma, k);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("poisson cdf spot values, consistency, monotonicity") {
  CHECK(dist::poisson_cdf(10.0, -1) == 0.0);
  CHECK(dist::poisson_cdf(0.0, 0) == 1.0);
  CHECK(dist::poisson_cdf(20.0, 15) ==
        doctest::Approx(0.1565131346397429).epsilon(1e-11));
  CHECK(dist::poisson_cdf(10.0, 15) ==
        doctest::Approx(0.9512595966960213).epsilon(1e-11));
  CHECK_THROWS_AS(dist::poisson_cdf(-0.5, 3), std::domain_error);

  for (double gamma : {4.0, 10.0, 20.0, 40.0, 120.0}) {
    double partial = 0.0;
    double prev = 0.0;
    for (std::int64_t k = 0; k <= oracles::poisson_tail_cut(gamma); ++k) {
      partial += dist::poisson_pmf(gamma, k);
      const double cdf = dist::poisson_cdf(gamma, k);
      CHECK(std::abs(cdf - partial) < 1e-12);
      CHECK(cdf >= prev);
      prev = cdf;
    }
  }
  // large-rate accumulation stays tight (compensated reference sum)
  double partial = 0.0;
  double carry = 0.0;
  for (std::int64_t k = 0; k <= 10500; ++k) {
    const double y = dist::poisson_pmf(1e4, k) - carry;
    const double t = partial + y;
    carry = (t - partial) - y;
    partial = t;
  }
  CHECK(std::abs(dist::poisson_cdf(1e4, 10500) - partial) < 1e-12);
}

TEST_CASE("poisson sampler moments and distribution") {
  dist::RandomStream stream(2024, 1);
  CHECK(dist::sample_poisson(stream, 0.0) == 0);
  CHECK_THROWS_AS(dist::sample_poisson(stream, -1.0), std::domain_error);

  const int draws = 1000000;
  std::vector<std::int64_t> samples(draws);
  std::vector<double> values(draws);
  for (int i = 0; i < draws; ++i) {
    samples[i] = dist::sample_poisson(stream, 10.0);
    values[i] = static_cast<double>(samples[i]);
  }
  const auto mv = oracles::mean_var(values);
  CHECK(std::abs(mv.mean - 10.0) < 0.01);
  CHECK(std::abs(mv.variance - 10.0) < 0.05);
  const double gap = oracles::ks_gap(
      samples, [](std::int64_t k) { return dist::poisson_cdf(10.0, k); }, 60);
  CHECK(gap < 0.005);
}

TEST_CASE("poisson sampler rejection path (large rate)") {
  dist::RandomStream stream(99, 5);
  const int draws = 200000;
  std::vector<std::int64_t> samples(draws);
  std::vector<double> values(draws);
  for (int i = 0; i < draws; ++i) {
    samples[i] = dist::sample_poisson(stream, 120.0);
    values[i] = static_cast<double>(samples[i]);
  }
  const auto mv = oracles::mean_var(values);
  CHECK(std::abs(mv.mean - 120.0) < 0.12);       // ~5 standard errors
  CHECK(std::abs(mv.variance - 120.0) < 4.0);
  const double gap = oracles::ks_gap(
      samples, [](std::int64_t k) { return dist::poisson_cdf(120.0, k); }, 260);
  CHECK(gap < 0.01);
}

TEST_CASE("binomial sampler") {
  dist::RandomStream stream(5, 11);
  CHECK(dist::sample_binomial(stream, 7, 0.0) == 0);
  CHECK(dist::sample_binomial(stream, 7, 1.0) == 7);
  CHECK(dist::sample_binomial(stream, 0, 0.4) == 0);
  CHECK_THROWS_AS(dist::sample_binomial(stream, 7, -0.1), std::domain_error);
  CHECK_THROWS_AS(dist::sample_binomial(stream, 7, 1.1), std::domain_error);
  CHECK_THROWS_AS(dist::sample_binomial(stream, -1, 0.5), std::domain_error);

  const int draws = 1000000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) {
    const std::int64_t k = dist::sample_binomial(stream, 20, 0.3);
    CHECK(k >= 0);
    CHECK(k <= 20);
    sum += static_cast<double>(k);
  }
  CHECK(std::abs(sum / draws - 6.0) < 0.01);
}

TEST_CASE("standard normal pdf/cdf") {
  CHECK(dist::std_normal_cdf(0.0) == 0.5);
  CHECK(dist::std_normal_pdf(0.0) ==
        doctest::Approx(0.3989422804014327).epsilon(1e-13));
  CHECK(dist::std_normal_cdf(-0.8485) ==
        doctest::Approx(0.19807978623143097).epsilon(1e-12));
  CHECK(dist::std_normal_cdf(1.0) ==
        doctest::Approx(0.8413447460685429).epsilon(1e-12));
  for (double x : {-3.0, -1.7, -0.4, 0.3, 1.1, 2.6}) {
    CHECK(std::abs(dist::std_normal_cdf(x) -
                   oracles::normal_cdf_by_quadrature(x)) < 1e-12);
    CHECK(std::abs(dist::std_normal_cdf(x) + dist::std_normal_cdf(-x) - 1.0) <
          1e-15);
  }
}

TEST_CASE("truncated normal moments") {
  const auto half = dist::truncated_normal_moments(0.0, 1.0);
  CHECK(half.defined);
  CHECK(half.mean == doctest::Approx(0.7978845608028654).epsilon(1e-12));
  CHECK(half.prob_positive == 0.5);

  const auto deep = dist::truncated_normal_moments(-100.0, 1.0);
  CHECK_FALSE(deep.defined);
  CHECK(deep.prob_positive == 0.0);
  CHECK(std::isnan(deep.mean));

  CHECK_THROWS_AS(dist::truncated_normal_moments(0.0, 0.0), std::domain_error);

  // z-score parameterization used by the relative-variance approximation:
  // p=0.3, mu=10, lambda=4 gives alpha = p*sqrt(2*lambda).
  const double mu_t = -2.0 * 0.3 * 10.0;
  const double sigma_t = 10.0 * std::sqrt(2.0 / 4.0);
  const auto tn = dist::truncated_normal_moments(mu_t, sigma_t);
  const double alpha = 0.3 * std::sqrt(2.0 * 4.0);
  CHECK(tn.prob_positive ==
        doctest::Approx(dist::std_normal_cdf(-alpha)).epsilon(1e-12));

  // quadrature oracle for the conditional moments
  auto pdf = [&](double t) {
    return oracles::normal_pdf((t - mu_t) / sigma_t) / sigma_t;
  };
  const double hi = mu_t + 12.0 * sigma_t;
  const double z = oracles::simpson(pdf, 0.0, hi, 40000);
  const double m1 =
      oracles::simpson([&](double t) { return t * pdf(t); }, 0.0, hi, 40000) / z;
  const double m2 =
      oracles::simpson([&](double t) { return t * t * pdf(t); }, 0.0, hi,
                       40000) /
      z;
  CHECK(tn.mean == doctest::Approx(m1).epsilon(1e-8));
  CHECK(tn.variance == doctest::Approx(m2 - m1 * m1).epsilon(1e-6));
  CHECK(tn.prob_positive == doctest::Approx(z).epsilon(1e-8));
}

TEST_CASE("truncated normal second-moment identity over a grid") {
  for (double mu_t = -20.0; mu_t <= 20.0; mu_t += 2.5) {
    for (double sigma_t : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
      const auto tn = dist::truncated_normal_moments(mu_t, sigma_t);
      if (!tn.defined) {
        CHECK(-mu_t / sigma_t > 8.0);
        continue;
      }
      CHECK(tn.variance + tn.mean * tn.mean >= 0.0);
      CHECK(tn.variance >= 0.0);
      CHECK(tn.mean >= mu_t);
    }
  }
}
