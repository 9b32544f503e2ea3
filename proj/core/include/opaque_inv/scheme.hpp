#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "opaque_inv/dist.hpp"

namespace opaque_inv::scheme {

/// Parameters of the (n,p) opaque scheme with scaled-Poisson base demand:
/// n non-opaque products, per-product switch probabilities, base Poisson
/// parameter lambda and per-product means. Per-product demand is
/// (mu_i/lambda) * Poisson(lambda), so each product's coefficient of
/// variation is 1/sqrt(lambda).
struct DemandProfile {
  int n;
  std::vector<double> switch_prob;  // p^i, one per product, each in [0,1]
  double lambda;                    // base Poisson parameter, > 0
  std::vector<double> mu;           // mu^i, one per product, each > 0

  DemandProfile(int n, std::vector<double> switch_prob, double lambda,
                std::vector<double> mu);

  /// Constant switch probability and mean across all products.
  static DemandProfile homogeneous(int n, double p, double lambda, double mu);

  bool has_homogeneous_mu() const;
  bool has_homogeneous_p() const;
};

/// One period of the three-stage demand pipeline. Totals are conserved:
/// sum(original) = sum(intermediate) + opaque = sum(adjusted).
struct PeriodDemands {
  std::vector<double> original;      // D_0^i
  std::vector<double> intermediate;  // X_p^i
  double opaque;                     // X_p^0
  std::vector<double> adjusted;      // D_p^i
};

/// Empirical demand statistics over a sample of periods. relative_variance
/// and avg_correlation are NaN where undefined (n = 1, or heterogeneous mu
/// for relative_variance).
struct DemandStats {
  double avg_variance;       // estimate of sigma^2_{n,p}
  double avg_correlation;    // mean pairwise Pearson correlation
  double relative_variance;  // position between sigma^2/n and sigma^2
  std::int64_t sample_count;
};

struct OriginalDraw {
  std::vector<std::int64_t> counts;  // raw Poisson(lambda) counts Y_i
  std::vector<double> demand;        // (mu_i/lambda) * Y_i
};

/// Stage 1: original demands before any opaque product is offered.
OriginalDraw generate_original(const DemandProfile& profile,
                               dist::RandomStream& stream);

struct IntermediateSplit {
  std::vector<double> intermediate;
  double opaque;
};

/// Stage 2: binomial thinning of the original counts. Each order stays with
/// its product with probability 1-p^i, otherwise moves to the opaque pool,
/// so totals are conserved per realization and each intermediate demand is
/// marginally scaled Poisson with rate (1-p^i)*lambda.
IntermediateSplit split_intermediate(const DemandProfile& profile,
                                     std::span<const std::int64_t> counts,
                                     dist::RandomStream& stream);

/// Stage 3, balancing policy on demand: water-fill the opaque volume onto
/// the products with the smallest deficit intermediate^i - mu^i, raising the
/// lowest deficits together; any volume left after all deficits level is
/// split equally. Minimizes the pairwise squared deviation
/// sum_{i<j} ((D^i-mu^i)-(D^j-mu^j))^2 over feasible allocations.
/// O(n log n). Throws std::domain_error for negative opaque volume.
std::vector<double> bpd_allocate(const DemandProfile& profile,
                                 std::span<const double> intermediate,
                                 double opaque);

/// All three stages for one period, using separate streams for the original
/// counts and for the thinning so that sweeps can hold original demand fixed
/// while the switch probability varies.
PeriodDemands generate_period(const DemandProfile& profile,
                              dist::RandomStream& demand_stream,
                              dist::RandomStream& thinning_stream);

/// Streaming accumulator behind estimate_stats; useful when samples are
/// produced period by period and never stored.
class DemandStatsAccumulator {
 public:
  explicit DemandStatsAccumulator(int n);

  void observe(std::span<const double> adjusted);
  DemandStats finalize(const DemandProfile& profile) const;

  std::int64_t count() const { return count_; }

 private:
  int n_;
  std::int64_t count_;
  std::vector<double> mean_;
  std::vector<double> m2_;        // per-product sum of squared deviations
  std::vector<double> comoment_;  // upper-triangle pairwise co-moments
};

/// Sample variance / correlation / relative variance of adjusted demands.
/// Relative variance uses the theoretical endpoints sigma^2 = mu^2/lambda
/// and sigma^2/n, so it requires homogeneous mu (NaN otherwise). Throws
/// std::invalid_argument for fewer than 2 samples.
DemandStats estimate_stats(const DemandProfile& profile,
                           std::span<const PeriodDemands> samples);

}  // namespace opaque_inv::scheme
