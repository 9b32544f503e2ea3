#include <benchmark/benchmark.h>

#include "opaque_inv/analytics.hpp"
#include "opaque_inv/dist.hpp"
#include "opaque_inv/inventory.hpp"
#include "opaque_inv/scheme.hpp"

using namespace opaque_inv;

static void BM_SamplePoissonInversion(benchmark::State& state) {
  dist::RandomStream stream(1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dist::sample_poisson(stream, 10.0));
  }
}
BENCHMARK(BM_SamplePoissonInversion);

static void BM_SamplePoissonRejection(benchmark::State& state) {
  dist::RandomStream stream(1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dist::sample_poisson(stream, 120.0));
  }
}
BENCHMARK(BM_SamplePoissonRejection);

static void BM_PoissonCdf(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(dist::poisson_cdf(120.0, 130));
  }
}
BENCHMARK(BM_PoissonCdf);

static void BM_PeriodPipeline(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto profile = scheme::DemandProfile::homogeneous(n, 0.5, 10.0, 10.0);
  dist::RandomStream demand(1, 0), thinning(1, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        scheme::generate_period(profile, demand, thinning));
  }
}
BENCHMARK(BM_PeriodPipeline)->Arg(2)->Arg(12);

static void BM_InventoryStep(benchmark::State& state) {
  inventory::InventoryState inv(3);
  const analytics::CostParams cost(1.0, 1.0, 3, 18.0);
  dist::RandomStream stream(1, 0);
  for (auto _ : state) {
    const double demand = static_cast<double>(dist::sample_poisson(stream, 10.0));
    benchmark::DoNotOptimize(inventory::step(inv, demand, cost));
  }
}
BENCHMARK(BM_InventoryStep);

static void BM_RunReplication(benchmark::State& state) {
  const auto profile = scheme::DemandProfile::homogeneous(4, 1.0, 10.0, 10.0);
  const analytics::CostParams cost(1.0, 1.0, 2, 15.0);
  for (auto _ : state) {
    dist::RandomStream demand(7, 0), thinning(7, 1);
    benchmark::DoNotOptimize(
        inventory::run_replication(profile, cost, demand, thinning, 10000, 100));
  }
}
BENCHMARK(BM_RunReplication);

static void BM_SigmaRelExact(benchmark::State& state) {
  const analytics::SchemeParams params(2, 0.5, 14.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(analytics::sigma_rel_exact(params));
  }
}
BENCHMARK(BM_SigmaRelExact);

BENCHMARK_MAIN();
