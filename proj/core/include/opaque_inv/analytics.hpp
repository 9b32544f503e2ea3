#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>

namespace opaque_inv::analytics {

/// Homogeneous (n,p) scheme parameters for the closed-form results.
/// alpha = p * sqrt(2*lambda) is the z-score that drives the relative
/// variance approximation.
struct SchemeParams {
  int n;
  double p;
  double lambda;
  double mu;

  SchemeParams(int n, double p, double lambda, double mu = 10.0);

  double alpha() const { return p * std::sqrt(2.0 * lambda); }
  double cv() const { return 1.0 / std::sqrt(lambda); }
};

/// Cost and shelf-life parameters of the periodic-review base-stock system:
/// per-unit shortage cost r, per-unit wastage cost theta, shelflife m
/// periods, base-stock level q.
struct CostParams {
  double r;
  double theta;
  int m;
  double q;

  CostParams(double r, double theta, int m, double q);
};

/// Analytic per-period per-product expectations for the (n,1) scheme:
/// exact expected shortage, wastage bounds, and the cost sandwich
/// cost_lb <= E[C] <= cost_ub = m * cost_lb.
struct CostBounds {
  double expected_shortage;
  double wastage_lb;
  double wastage_ub;
  double cost_lb;
  double cost_ub;
  std::int64_t s_threshold;  // floor(n * lambda * q / mu)
};

/// floor(n * lambda * q / mu), with values within 1e-9 relative of an
/// integer snapped to it before flooring.
std::int64_t stock_index(int n, double lambda, double mu, double q);

/// sigma^2_{n,p} = (1 + (n-1)*sigma_rel2) / n * sigma2.
double sigma_np_from_rel(int n, double sigma2, double sigma_rel2);

/// Inverse map: relative variance from sigma^2_{n,p}; requires n >= 2.
double rel_from_sigma_np(int n, double sigma2, double sigma_np2);

/// rho_p = (1 - x) / (1 + (n-1)*x); the rel <-> rho map is an involution,
/// so both directions share the same formula. Requires n >= 2 and
/// input in [0,1].
double rho_from_rel(int n, double sigma_rel2);
double rel_from_rho(int n, double rho);

/// Normal approximation of the relative variance:
/// 2*(1+alpha^2)*Phi(-alpha) - 2*alpha*phi(alpha), clamped at 0 against
/// floating cancellation in the deep tail.
double sigma_rel_approx(const SchemeParams& params);

/// Exact relative variance for two products: triple sum over the joint pmf
/// of independent counts K1, K2 ~ Poisson((1-p)*lambda) and
/// K0 ~ Poisson(2*p*lambda), with T = (mu/lambda)*(K1 - K2 - K0) and
/// sigma_rel^2 = 2*E[T^2; T>0] / var(T). Each marginal support is truncated
/// once its cumulative mass reaches 1 - mass_tolerance.
double sigma_rel_exact(const SchemeParams& params,
                       double mass_tolerance = 1e-12);

/// E[S] = (mu - q)*(1 - F_{Y_{n*lambda}}(s)) + mu * P_{Y_{n*lambda}}(s),
/// s = stock_index. Exact for the (n,1) scheme.
double expected_shortage(int n, double lambda, double mu, double q);

/// Wastage sandwich {lb, m*lb} with
/// lb = (q/m - mu)*F_{Y_{n*m*lambda}}(s) + mu * P_{Y_{n*m*lambda}}(s).
std::pair<double, double> wastage_bounds(int n, double lambda, double mu,
                                         double q, int m);

/// cost_lb = r * E[S] + theta * wastage_lb; cost_ub = m * cost_lb.
CostBounds cost_bounds(int n, double lambda, double mu,
                       const CostParams& cost);

struct ThresholdResult {
  double sigma2_th;  // mu^2 / (n_th * lambda)
  int n_th;
};

/// Largest pooled variance sigma^2_{n,1} whose analytic cost lower bound
/// stays below delta, scanning n = 2..n_max; nullopt when no n qualifies.
std::optional<ThresholdResult> threshold_variance(double lambda, double mu,
                                                  const CostParams& cost,
                                                  double delta,
                                                  int n_max = 64);

}  // namespace opaque_inv::analytics
