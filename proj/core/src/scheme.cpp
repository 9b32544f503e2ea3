#include "opaque_inv/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace opaque_inv::scheme {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

DemandProfile::DemandProfile(int n_in, std::vector<double> switch_prob_in,
                             double lambda_in, std::vector<double> mu_in)
    : n(n_in), switch_prob(std::move(switch_prob_in)), lambda(lambda_in),
      mu(std::move(mu_in)) {
  if (n < 1) throw std::invalid_argument("DemandProfile: n < 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("DemandProfile: lambda <= 0");
  if (switch_prob.size() == 1 && n > 1) {
    switch_prob.assign(static_cast<std::size_t>(n), switch_prob[0]);
  }
  if (mu.size() == 1 && n > 1) {
    mu.assign(static_cast<std::size_t>(n), mu[0]);
  }
  if (switch_prob.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("DemandProfile: switch_prob size != n");
  }
  if (mu.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("DemandProfile: mu size != n");
  }
  for (double p : switch_prob) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("DemandProfile: p outside [0,1]");
    }
  }
  for (double m : mu) {
    if (!(m > 0.0)) throw std::invalid_argument("DemandProfile: mu <= 0");
  }
}

DemandProfile DemandProfile::homogeneous(int n, double p, double lambda,
                                         double mu) {
  return DemandProfile(n, std::vector<double>{p}, lambda,
                       std::vector<double>{mu});
}

bool DemandProfile::has_homogeneous_mu() const {
  return std::all_of(mu.begin(), mu.end(),
                     [&](double m) { return m == mu.front(); });
}

bool DemandProfile::has_homogeneous_p() const {
  return std::all_of(switch_prob.begin(), switch_prob.end(),
                     [&](double p) { return p == switch_prob.front(); });
}

OriginalDraw generate_original(const DemandProfile& profile,
                               dist::RandomStream& stream) {
  OriginalDraw draw;
  draw.counts.resize(static_cast<std::size_t>(profile.n));
  draw.demand.resize(static_cast<std::size_t>(profile.n));
  for (int i = 0; i < profile.n; ++i) {
    const std::int64_t y = dist::sample_poisson(stream, profile.lambda);
    draw.counts[i] = y;
    draw.demand[i] =
        profile.mu[i] / profile.lambda * static_cast<double>(y);
  }
  return draw;
}

IntermediateSplit split_intermediate(const DemandProfile& profile,
                                     std::span<const std::int64_t> counts,
                                     dist::RandomStream& stream) {
  if (counts.size() != static_cast<std::size_t>(profile.n)) {
    throw std::invalid_argument("split_intermediate: counts size != n");
  }
  IntermediateSplit split;
  split.intermediate.resize(static_cast<std::size_t>(profile.n));
  split.opaque = 0.0;
  for (int i = 0; i < profile.n; ++i) {
    const std::int64_t kept =
        dist::sample_binomial(stream, counts[i], 1.0 - profile.switch_prob[i]);
    const double scale = profile.mu[i] / profile.lambda;
    split.intermediate[i] = scale * static_cast<double>(kept);
    split.opaque += scale * static_cast<double>(counts[i] - kept);
  }
  return split;
}

std::vector<double> bpd_allocate(const DemandProfile& profile,
                                 std::span<const double> intermediate,
                                 double opaque) {
  if (!(opaque >= 0.0)) throw std::domain_error("bpd_allocate: opaque < 0");
  if (intermediate.size() != static_cast<std::size_t>(profile.n)) {
    throw std::invalid_argument("bpd_allocate: intermediate size != n");
  }
  std::vector<double> adjusted(intermediate.begin(), intermediate.end());
  if (opaque == 0.0) return adjusted;

  const auto n = static_cast<std::size_t>(profile.n);
  std::vector<double> deficit(n);
  for (std::size_t i = 0; i < n; ++i) {
    deficit[i] = intermediate[i] - profile.mu[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return deficit[a] < deficit[b];
  });

  // Raise the k lowest deficit levels together until the next level is
  // reached or the volume runs out; leftover after full leveling spreads
  // equally over all n products.
  double volume = opaque;
  double level = deficit[order[0]];
  std::size_t k = 1;
  while (k < n) {
    const double lift = (deficit[order[k]] - level) * static_cast<double>(k);
    if (lift >= volume) break;
    volume -= lift;
    level = deficit[order[k]];
    ++k;
  }
  level += volume / static_cast<double>(k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t i = order[j];
    adjusted[i] = profile.mu[i] + level;
  }
  return adjusted;
}

PeriodDemands generate_period(const DemandProfile& profile,
                              dist::RandomStream& demand_stream,
                              dist::RandomStream& thinning_stream) {
  PeriodDemands period;
  OriginalDraw draw = generate_original(profile, demand_stream);
  IntermediateSplit split =
      split_intermediate(profile, draw.counts, thinning_stream);
  period.original = std::move(draw.demand);
  period.opaque = split.opaque;
  period.adjusted = bpd_allocate(profile, split.intermediate, split.opaque);
  period.intermediate = std::move(split.intermediate);
  return period;
}

DemandStatsAccumulator::DemandStatsAccumulator(int n)
    : n_(n), count_(0), mean_(static_cast<std::size_t>(n), 0.0),
      m2_(static_cast<std::size_t>(n), 0.0),
      comoment_(static_cast<std::size_t>(n) * (n - 1) / 2, 0.0) {
  if (n < 1) throw std::invalid_argument("DemandStatsAccumulator: n < 1");
}

void DemandStatsAccumulator::observe(std::span<const double> adjusted) {
  if (adjusted.size() != static_cast<std::size_t>(n_)) {
    throw std::invalid_argument("DemandStatsAccumulator: sample size != n");
  }
  ++count_;
  const double inv_count = 1.0 / static_cast<double>(count_);
  // Welford update; pairwise co-moments use delta(old) * delta(new).
  std::vector<double> delta_old(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    delta_old[i] = adjusted[i] - mean_[i];
    mean_[i] += delta_old[i] * inv_count;
    m2_[i] += delta_old[i] * (adjusted[i] - mean_[i]);
  }
  std::size_t pair = 0;
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j, ++pair) {
      comoment_[pair] += delta_old[i] * (adjusted[j] - mean_[j]);
    }
  }
}

DemandStats DemandStatsAccumulator::finalize(
    const DemandProfile& profile) const {
  if (profile.n != n_) {
    throw std::invalid_argument("DemandStatsAccumulator: profile n mismatch");
  }
  if (count_ < 2) {
    throw std::invalid_argument("estimate_stats: fewer than 2 samples");
  }
  DemandStats stats{};
  stats.sample_count = count_;

  const double denom = static_cast<double>(count_ - 1);
  double var_sum = 0.0;
  for (int i = 0; i < n_; ++i) var_sum += m2_[i] / denom;
  stats.avg_variance = var_sum / static_cast<double>(n_);

  if (n_ >= 2) {
    double corr_sum = 0.0;
    std::size_t pair = 0;
    for (int i = 0; i < n_; ++i) {
      for (int j = i + 1; j < n_; ++j, ++pair) {
        corr_sum += comoment_[pair] / std::sqrt(m2_[i] * m2_[j]);
      }
    }
    stats.avg_correlation =
        corr_sum / static_cast<double>(comoment_.size());
  } else {
    stats.avg_correlation = kNaN;
  }

  if (n_ >= 2 && profile.has_homogeneous_mu()) {
    const double mu = profile.mu.front();
    const double sigma2 = mu * mu / profile.lambda;
    const double floor_var = sigma2 / static_cast<double>(n_);
    stats.relative_variance =
        (stats.avg_variance - floor_var) / (sigma2 - floor_var);
  } else {
    stats.relative_variance = kNaN;
  }
  return stats;
}

DemandStats estimate_stats(const DemandProfile& profile,
                           std::span<const PeriodDemands> samples) {
  DemandStatsAccumulator acc(profile.n);
  for (const PeriodDemands& period : samples) acc.observe(period.adjusted);
  return acc.finalize(profile);
}

}  // namespace opaque_inv::scheme
