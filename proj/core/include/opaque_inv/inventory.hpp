#pragma once

#include <cstdint>
#include <vector>

#include "opaque_inv/analytics.hpp"
#include "opaque_inv/dist.hpp"
#include "opaque_inv/scheme.hpp"

namespace opaque_inv::inventory {

/// Age-bucketed on-hand inventory for one product. buckets[a] holds the
/// quantity that has spent a periods on the shelf; buckets[0] is the stock
/// that arrived this period.
struct InventoryState {
  explicit InventoryState(int shelf_life);

  std::vector<double> buckets;

  double on_hand() const;
};

struct PeriodOutcome {
  double shortage;        // lost sales this period
  double wastage;         // units expired this period
  double order_quantity;  // replenishment placed this period
  double cost;            // r * shortage + theta * wastage
};

/// One period of the base-stock system: replenish up to q (fresh units,
/// zero lead time), serve demand FIFO from the oldest bucket down, lose any
/// unmet remainder, then expire whatever is left in the oldest bucket and
/// age the rest by one period.
PeriodOutcome step(InventoryState& state, double demand,
                   const analytics::CostParams& cost);

/// Per-period per-product averages over the post-burn-in periods of one
/// replication. std_error_cost is the i.i.d. standard error of the
/// per-period cost series.
struct SimMetrics {
  double mean_shortage;
  double mean_wastage;
  double mean_cost;
  double std_error_cost;
  std::int64_t periods_used;
  std::int64_t burn_in_discarded;
};

/// One replication: per period run the demand pipeline
/// (original -> intermediate -> BPD-adjusted) and feed each product's
/// adjusted demand to its own inventory state. Deterministic given the
/// streams. Demand counts are drawn from demand_stream and binomial splits
/// from thinning_stream so that sweeps can vary p under common demand
/// draws.
SimMetrics run_replication(const scheme::DemandProfile& profile,
                           const analytics::CostParams& cost,
                           dist::RandomStream& demand_stream,
                           dist::RandomStream& thinning_stream,
                           std::int64_t periods, std::int64_t burn_in);

/// Single-stream convenience overload: counts and splits share one stream.
SimMetrics run_replication(const scheme::DemandProfile& profile,
                           const analytics::CostParams& cost,
                           dist::RandomStream& stream, std::int64_t periods,
                           std::int64_t burn_in);

/// Replay precomputed demand paths (row-major periods x products) through
/// independent per-product inventory states. Lets one set of demand draws
/// serve several (m, q) settings.
SimMetrics run_demand_paths(const std::vector<double>& demands, int products,
                            const analytics::CostParams& cost,
                            std::int64_t burn_in);

}  // namespace opaque_inv::inventory
