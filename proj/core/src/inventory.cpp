#include "opaque_inv/inventory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace opaque_inv::inventory {

InventoryState::InventoryState(int shelf_life)
    : buckets(static_cast<std::size_t>(shelf_life), 0.0) {
  if (shelf_life < 1) throw std::invalid_argument("InventoryState: m < 1");
}

double InventoryState::on_hand() const {
  return std::accumulate(buckets.begin(), buckets.end(), 0.0);
}

PeriodOutcome step(InventoryState& state, double demand,
                   const analytics::CostParams& cost) {
  if (!(demand >= 0.0)) throw std::invalid_argument("step: demand < 0");
  if (state.buckets.size() != static_cast<std::size_t>(cost.m)) {
    throw std::invalid_argument("step: state shelflife != cost.m");
  }
  const std::size_t m = state.buckets.size();

  PeriodOutcome outcome{};
  outcome.order_quantity = std::max(0.0, cost.q - state.on_hand());
  state.buckets[0] += outcome.order_quantity;

  double remaining = demand;
  for (std::size_t a = m; a-- > 0 && remaining > 0.0;) {
    const double served = std::min(state.buckets[a], remaining);
    state.buckets[a] -= served;
    remaining -= served;
  }
  outcome.shortage = remaining;

  outcome.wastage = state.buckets[m - 1];
  for (std::size_t a = m - 1; a > 0; --a) state.buckets[a] = state.buckets[a - 1];
  state.buckets[0] = 0.0;

  outcome.cost = cost.r * outcome.shortage + cost.theta * outcome.wastage;
  return outcome;
}

namespace {

class MetricsAccumulator {
 public:
  void record(double shortage, double wastage, double cost) {
    ++count_;
    shortage_sum_ += shortage;
    wastage_sum_ += wastage;
    const double delta = cost - cost_mean_;
    cost_mean_ += delta / static_cast<double>(count_);
    cost_m2_ += delta * (cost - cost_mean_);
  }

  SimMetrics finalize(std::int64_t burn_in) const {
    SimMetrics metrics{};
    metrics.periods_used = count_;
    metrics.burn_in_discarded = burn_in;
    metrics.mean_shortage = shortage_sum_ / static_cast<double>(count_);
    metrics.mean_wastage = wastage_sum_ / static_cast<double>(count_);
    metrics.mean_cost = cost_mean_;
    metrics.std_error_cost =
        count_ > 1 ? std::sqrt(cost_m2_ / static_cast<double>(count_ - 1) /
                               static_cast<double>(count_))
                   : 0.0;
    return metrics;
  }

 private:
  std::int64_t count_ = 0;
  double shortage_sum_ = 0.0;
  double wastage_sum_ = 0.0;
  double cost_mean_ = 0.0;
  double cost_m2_ = 0.0;
};

void check_run_args(std::int64_t periods, std::int64_t burn_in) {
  if (burn_in < 0) throw std::invalid_argument("run: burn_in < 0");
  if (periods <= burn_in) {
    throw std::invalid_argument("run: periods must exceed burn_in");
  }
}

}  // namespace

SimMetrics run_replication(const scheme::DemandProfile& profile,
                           const analytics::CostParams& cost,
                           dist::RandomStream& demand_stream,
                           dist::RandomStream& thinning_stream,
                           std::int64_t periods, std::int64_t burn_in) {
  check_run_args(periods, burn_in);
  const int n = profile.n;
  std::vector<InventoryState> states(static_cast<std::size_t>(n),
                                     InventoryState(cost.m));
  MetricsAccumulator acc;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::int64_t t = 0; t < periods; ++t) {
    const scheme::PeriodDemands period =
        scheme::generate_period(profile, demand_stream, thinning_stream);
    double shortage = 0.0;
    double wastage = 0.0;
    double period_cost = 0.0;
    for (int i = 0; i < n; ++i) {
      const PeriodOutcome outcome = step(states[i], period.adjusted[i], cost);
      shortage += outcome.shortage;
      wastage += outcome.wastage;
      period_cost += outcome.cost;
    }
    if (t >= burn_in) {
      acc.record(shortage * inv_n, wastage * inv_n, period_cost * inv_n);
    }
  }
  return acc.finalize(burn_in);
}

SimMetrics run_replication(const scheme::DemandProfile& profile,
                           const analytics::CostParams& cost,
                           dist::RandomStream& stream, std::int64_t periods,
                           std::int64_t burn_in) {
  return run_replication(profile, cost, stream, stream, periods, burn_in);
}

SimMetrics run_demand_paths(const std::vector<double>& demands, int products,
                            const analytics::CostParams& cost,
                            std::int64_t burn_in) {
  if (products < 1) throw std::invalid_argument("run_demand_paths: products < 1");
  if (demands.size() % static_cast<std::size_t>(products) != 0) {
    throw std::invalid_argument("run_demand_paths: ragged demand matrix");
  }
  const auto periods =
      static_cast<std::int64_t>(demands.size() / static_cast<std::size_t>(products));
  check_run_args(periods, burn_in);

  std::vector<InventoryState> states(static_cast<std::size_t>(products),
                                     InventoryState(cost.m));
  MetricsAccumulator acc;
  const double inv_n = 1.0 / static_cast<double>(products);
  for (std::int64_t t = 0; t < periods; ++t) {
    const double* row = demands.data() + t * products;
    double shortage = 0.0;
    double wastage = 0.0;
    double period_cost = 0.0;
    for (int i = 0; i < products; ++i) {
      const PeriodOutcome outcome = step(states[i], row[i], cost);
      shortage += outcome.shortage;
      wastage += outcome.wastage;
      period_cost += outcome.cost;
    }
    if (t >= burn_in) {
      acc.record(shortage * inv_n, wastage * inv_n, period_cost * inv_n);
    }
  }
  return acc.finalize(burn_in);
}

}  // namespace opaque_inv::inventory
