#include "opaque_inv/analytics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "opaque_inv/dist.hpp"

namespace opaque_inv::analytics {

namespace {

// Poisson pmf table covering cumulative mass >= 1 - tol, by log-space
// evaluation so large rates stay finite.
std::vector<double> pmf_table(double gamma, double tol) {
  if (gamma == 0.0) return {1.0};
  const auto cap = static_cast<std::int64_t>(
      gamma + 20.0 * std::sqrt(gamma) + 200.0);
  std::vector<double> pmf;
  pmf.reserve(static_cast<std::size_t>(cap) + 1);
  double mass = 0.0;
  for (std::int64_t k = 0; k <= cap; ++k) {
    const double p = dist::poisson_pmf(gamma, k);
    pmf.push_back(p);
    mass += p;
    if (mass >= 1.0 - tol) break;
  }
  return pmf;
}

}  // namespace

SchemeParams::SchemeParams(int n_in, double p_in, double lambda_in,
                           double mu_in)
    : n(n_in), p(p_in), lambda(lambda_in), mu(mu_in) {
  if (n < 1) throw std::domain_error("SchemeParams: n < 1");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("SchemeParams: p outside [0,1]");
  }
  if (!(lambda > 0.0)) throw std::domain_error("SchemeParams: lambda <= 0");
  if (!(mu > 0.0)) throw std::domain_error("SchemeParams: mu <= 0");
}

CostParams::CostParams(double r_in, double theta_in, int m_in, double q_in)
    : r(r_in), theta(theta_in), m(m_in), q(q_in) {
  if (!(r >= 0.0)) throw std::domain_error("CostParams: r < 0");
  if (!(theta >= 0.0)) throw std::domain_error("CostParams: theta < 0");
  if (m < 1) throw std::domain_error("CostParams: m < 1");
  if (!(q >= 0.0)) throw std::domain_error("CostParams: q < 0");
}

std::int64_t stock_index(int n, double lambda, double mu, double q) {
  double x = static_cast<double>(n) * lambda * q / mu;
  const double nearest = std::round(x);
  if (std::abs(x - nearest) < 1e-9 * std::max(1.0, std::abs(x))) x = nearest;
  return static_cast<std::int64_t>(std::floor(x));
}

double sigma_np_from_rel(int n, double sigma2, double sigma_rel2) {
  if (n < 1) throw std::domain_error("sigma_np_from_rel: n < 1");
  if (!(sigma2 >= 0.0)) throw std::domain_error("sigma_np_from_rel: sigma2 < 0");
  if (!(sigma_rel2 >= 0.0 && sigma_rel2 <= 1.0)) {
    throw std::domain_error("sigma_np_from_rel: sigma_rel2 outside [0,1]");
  }
  return (1.0 + static_cast<double>(n - 1) * sigma_rel2) /
         static_cast<double>(n) * sigma2;
}

double rel_from_sigma_np(int n, double sigma2, double sigma_np2) {
  if (n < 2) throw std::domain_error("rel_from_sigma_np: n < 2");
  if (!(sigma2 > 0.0)) throw std::domain_error("rel_from_sigma_np: sigma2 <= 0");
  const double floor_var = sigma2 / static_cast<double>(n);
  return (sigma_np2 - floor_var) / (sigma2 - floor_var);
}

namespace {
double involution_map(int n, double x, const char* what) {
  if (n < 2) throw std::domain_error(std::string(what) + ": n < 2");
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error(std::string(what) + ": input outside [0,1]");
  }
  return (1.0 - x) / (1.0 + static_cast<double>(n - 1) * x);
}
}  // namespace

double rho_from_rel(int n, double sigma_rel2) {
  return involution_map(n, sigma_rel2, "rho_from_rel");
}

double rel_from_rho(int n, double rho) {
  return involution_map(n, rho, "rel_from_rho");
}

double sigma_rel_approx(const SchemeParams& params) {
  const double a = params.alpha();
  const double value = 2.0 * (1.0 + a * a) * dist::std_normal_cdf(-a) -
                       2.0 * a * dist::std_normal_pdf(a);
  return std::max(value, 0.0);
}

double sigma_rel_exact(const SchemeParams& params, double mass_tolerance) {
  if (!(mass_tolerance > 0.0)) {
    throw std::domain_error("sigma_rel_exact: mass_tolerance <= 0");
  }
  const double lambda = params.lambda;
  const double p = params.p;
  const std::vector<double> pmf1 = pmf_table((1.0 - p) * lambda, mass_tolerance);
  const std::vector<double> pmf2 = pmf1;
  const std::vector<double> pmf0 = pmf_table(2.0 * p * lambda, mass_tolerance);

  // sum over k1 > k2 + k0 of (k1 - k2 - k0)^2 * pmf, Kahan-compensated.
  double sum = 0.0;
  double carry = 0.0;
  for (std::size_t k2 = 0; k2 < pmf2.size(); ++k2) {
    for (std::size_t k0 = 0; k0 < pmf0.size(); ++k0) {
      const std::size_t w = k2 + k0;
      const double pw = pmf2[k2] * pmf0[k0];
      for (std::size_t k1 = w + 1; k1 < pmf1.size(); ++k1) {
        const double diff = static_cast<double>(k1 - w);
        const double term = diff * diff * pmf1[k1] * pw;
        const double y = term - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
      }
    }
  }
  return sum / lambda;
}

double expected_shortage(int n, double lambda, double mu, double q) {
  if (n < 1) throw std::domain_error("expected_shortage: n < 1");
  if (!(lambda > 0.0)) throw std::domain_error("expected_shortage: lambda <= 0");
  if (!(mu > 0.0)) throw std::domain_error("expected_shortage: mu <= 0");
  if (!(q >= 0.0)) throw std::domain_error("expected_shortage: q < 0");
  const std::int64_t s = stock_index(n, lambda, mu, q);
  const double gamma = static_cast<double>(n) * lambda;
  const double tail = 1.0 - dist::poisson_cdf(gamma, s);
  const double value = (mu - q) * tail + mu * dist::poisson_pmf(gamma, s);
  return std::max(value, 0.0);
}

std::pair<double, double> wastage_bounds(int n, double lambda, double mu,
                                         double q, int m) {
  if (m < 1) throw std::domain_error("wastage_bounds: m < 1");
  if (n < 1) throw std::domain_error("wastage_bounds: n < 1");
  if (!(lambda > 0.0)) throw std::domain_error("wastage_bounds: lambda <= 0");
  if (!(mu > 0.0)) throw std::domain_error("wastage_bounds: mu <= 0");
  if (!(q >= 0.0)) throw std::domain_error("wastage_bounds: q < 0");
  const std::int64_t s = stock_index(n, lambda, mu, q);
  const double gamma = static_cast<double>(n) * m * lambda;
  const double lb_raw =
      (q / m - mu) * dist::poisson_cdf(gamma, s) +
      mu * dist::poisson_pmf(gamma, s);
  const double lb = std::max(lb_raw, 0.0);
  return {lb, static_cast<double>(m) * lb};
}

CostBounds cost_bounds(int n, double lambda, double mu,
                       const CostParams& cost) {
  CostBounds bounds{};
  bounds.expected_shortage = expected_shortage(n, lambda, mu, cost.q);
  const auto [wlb, wub] = wastage_bounds(n, lambda, mu, cost.q, cost.m);
  bounds.wastage_lb = wlb;
  bounds.wastage_ub = wub;
  bounds.cost_lb = cost.r * bounds.expected_shortage + cost.theta * wlb;
  bounds.cost_ub = static_cast<double>(cost.m) * bounds.cost_lb;
  bounds.s_threshold = stock_index(n, lambda, mu, cost.q);
  return bounds;
}

std::optional<ThresholdResult> threshold_variance(double lambda, double mu,
                                                  const CostParams& cost,
                                                  double delta, int n_max) {
  if (!(delta > 0.0)) throw std::domain_error("threshold_variance: delta <= 0");
  if (n_max < 2) throw std::domain_error("threshold_variance: n_max < 2");
  // sigma^2_{n,1} = mu^2/(n*lambda) decreases in n, so the max qualifying
  // variance belongs to the smallest qualifying n.
  for (int n = 2; n <= n_max; ++n) {
    if (cost_bounds(n, lambda, mu, cost).cost_lb <= delta) {
      return ThresholdResult{mu * mu / (static_cast<double>(n) * lambda), n};
    }
  }
  return std::nullopt;
}

}  // namespace opaque_inv::analytics
