#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "opaque_inv/dist.hpp"
#include "opaque_inv/inventory.hpp"
#include "opaque_inv/scheme.hpp"

namespace opaque_inv::experiments {

/// Cartesian scenario grid. A sweep simulates every
/// (n, p, lambda, m, q) combination with `replications` independent
/// replications of `periods` periods each.
struct ScenarioGrid {
  std::vector<int> n_values;
  std::vector<double> p_values;
  std::vector<double> lambda_values;
  double mu = 10.0;
  std::vector<int> m_values;
  std::vector<double> q_values;
  double r = 1.0;
  double theta = 1.0;
  std::int64_t periods = 10000;
  std::int64_t replications = 1;
  std::uint64_t seed = 12345;
  std::int64_t burn_in = -1;  // negative: use max(100, 5m)
  std::size_t cell_budget = 100000;

  void validate() const;
  std::int64_t effective_burn_in(int m) const;
  std::size_t cell_count() const;
};

/// One output row per grid cell. Analytic columns hold NaN where the
/// quantity is undefined: sigma_rel and sigma_rel_approx need n >= 2, the
/// cost bounds apply at p = 1 only.
struct ResultRow {
  int n;
  double p;
  double lambda;
  int m;
  double q;
  double sigma_np;
  double sigma_rel;
  double sigma_rel_approx;
  double mean_shortage;
  double mean_wastage;
  double mean_cost;
  double cost_lb;
  double cost_ub;
  double std_error_cost;
};

/// Stream ids for one replication. They depend on the n and lambda grid
/// indices and the replication index but never on p, which is what makes
/// p-sweeps run on common random numbers: original demand counts are drawn
/// from the demand stream only, so they are identical across p.
struct StreamIds {
  std::uint64_t demand;
  std::uint64_t thinning;
};

StreamIds replication_streams(std::size_t n_index, std::size_t lambda_index,
                              std::int64_t rep);

/// Adjusted demand paths (row-major periods x n) plus their statistics, as
/// produced for one replication of a sweep cell.
struct DemandPaths {
  std::vector<double> adjusted;
  scheme::DemandStats stats;
};

DemandPaths simulate_demand_paths(const scheme::DemandProfile& profile,
                                  dist::RandomStream& demand_stream,
                                  dist::RandomStream& thinning_stream,
                                  std::int64_t periods);

/// Run the full grid. threads <= 0 selects the machine's hardware
/// concurrency. Output is deterministic for a given seed regardless of the
/// thread count: work is written into preassigned slots and reduced in
/// replication order.
std::vector<ResultRow> run_sweep(const ScenarioGrid& grid, int threads = 0);

/// The 20-cell (m, q, n) comparison table: m=2 with q in {15, 18} and m=3
/// with q in {18, 22}, n in {1, 2, 4, 8, 12}, p = 1, lambda = 10, mu = 10,
/// r = theta = 1. threshold_flag marks, per (m, q) block, the row with the
/// largest analytic cost_lb still at or below 0.01.
struct Table2Result {
  std::vector<ResultRow> rows;
  std::vector<bool> threshold_flag;
};

Table2Result reproduce_table2(std::uint64_t seed, std::int64_t periods,
                              std::int64_t replications, int threads = 0);

/// Preset grids behind the `reproduce` CLI subcommand.
ScenarioGrid fig_cv_grid();          // n=2, lambda in {4,10,14}, p sweep
ScenarioGrid fig_npr_grid();         // n in {2,4,8,12}, lambda=10, p sweep
ScenarioGrid fig_cost_grid(int m);   // n=12, lambda=10, p sweep, q sweep

std::string to_csv(const std::vector<ResultRow>& rows);
std::string to_csv(const Table2Result& table);

void emit_csv(const std::vector<ResultRow>& rows,
              const std::filesystem::path& path);
void emit_csv(const Table2Result& table, const std::filesystem::path& path);
void emit_json(const std::vector<ResultRow>& rows,
               const std::filesystem::path& path);
void emit_json(const Table2Result& table, const std::filesystem::path& path);

}  // namespace opaque_inv::experiments
