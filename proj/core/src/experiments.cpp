#include "opaque_inv/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "opaque_inv/analytics.hpp"

namespace opaque_inv::experiments {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

void ScenarioGrid::validate() const {
  if (n_values.empty() || p_values.empty() || lambda_values.empty() ||
      m_values.empty() || q_values.empty()) {
    throw std::invalid_argument("ScenarioGrid: empty coordinate list");
  }
  for (int n : n_values) {
    if (n < 1) throw std::invalid_argument("ScenarioGrid: n < 1");
  }
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("ScenarioGrid: p outside [0,1]");
    }
  }
  for (double lambda : lambda_values) {
    if (!(lambda > 0.0)) throw std::invalid_argument("ScenarioGrid: lambda <= 0");
  }
  for (int m : m_values) {
    if (m < 1) throw std::invalid_argument("ScenarioGrid: m < 1");
    if (periods <= effective_burn_in(m)) {
      throw std::invalid_argument("ScenarioGrid: periods must exceed burn-in");
    }
  }
  for (double q : q_values) {
    if (!(q >= 0.0)) throw std::invalid_argument("ScenarioGrid: q < 0");
  }
  if (!(mu > 0.0)) throw std::invalid_argument("ScenarioGrid: mu <= 0");
  if (!(r >= 0.0) || !(theta >= 0.0)) {
    throw std::invalid_argument("ScenarioGrid: negative cost rate");
  }
  if (replications < 1) {
    throw std::invalid_argument("ScenarioGrid: replications < 1");
  }
  if (cell_count() > cell_budget) {
    throw std::invalid_argument("ScenarioGrid: grid exceeds cell budget");
  }
}

std::int64_t ScenarioGrid::effective_burn_in(int m) const {
  if (burn_in >= 0) return burn_in;
  return std::max<std::int64_t>(100, 5 * static_cast<std::int64_t>(m));
}

std::size_t ScenarioGrid::cell_count() const {
  std::size_t cells = 1;
  for (std::size_t dim : {n_values.size(), p_values.size(),
                          lambda_values.size(), m_values.size(),
                          q_values.size()}) {
    if (dim == 0) return 0;
    if (cells > cell_budget) return cells;
    cells *= dim;
  }
  return cells;
}

StreamIds replication_streams(std::size_t n_index, std::size_t lambda_index,
                              std::int64_t rep) {
  const std::uint64_t base =
      ((static_cast<std::uint64_t>(n_index) & 0xFFu) << 56) |
      ((static_cast<std::uint64_t>(lambda_index) & 0xFFu) << 48) |
      ((static_cast<std::uint64_t>(rep) & 0xFFFFFFFFull) << 16);
  return {base, base | 1u};
}

DemandPaths simulate_demand_paths(const scheme::DemandProfile& profile,
                                  dist::RandomStream& demand_stream,
                                  dist::RandomStream& thinning_stream,
                                  std::int64_t periods) {
  if (periods < 2) {
    throw std::invalid_argument("simulate_demand_paths: periods < 2");
  }
  const int n = profile.n;
  DemandPaths paths;
  paths.adjusted.resize(static_cast<std::size_t>(periods) * n);
  scheme::DemandStatsAccumulator acc(n);
  for (std::int64_t t = 0; t < periods; ++t) {
    const scheme::PeriodDemands period =
        scheme::generate_period(profile, demand_stream, thinning_stream);
    std::copy(period.adjusted.begin(), period.adjusted.end(),
              paths.adjusted.begin() + static_cast<std::size_t>(t) * n);
    acc.observe(period.adjusted);
  }
  paths.stats = acc.finalize(profile);
  return paths;
}

namespace {

struct UnitResult {
  scheme::DemandStats stats{};
  std::vector<inventory::SimMetrics> metrics;  // indexed m_index * Q + q_index
};

int resolve_threads(int threads, std::size_t unit_count) {
  int t = threads > 0 ? threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  if (t < 1) t = 1;
  return static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(t), unit_count));
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

std::vector<ResultRow> run_sweep(const ScenarioGrid& grid, int threads) {
  grid.validate();

  const std::size_t n_count = grid.n_values.size();
  const std::size_t p_count = grid.p_values.size();
  const std::size_t l_count = grid.lambda_values.size();
  const std::size_t m_count = grid.m_values.size();
  const std::size_t q_count = grid.q_values.size();
  const auto reps = static_cast<std::size_t>(grid.replications);

  struct Unit {
    std::size_t n_i, l_i, p_i;
    std::int64_t rep;
  };
  std::vector<Unit> units;
  units.reserve(n_count * l_count * p_count * reps);
  for (std::size_t n_i = 0; n_i < n_count; ++n_i) {
    for (std::size_t l_i = 0; l_i < l_count; ++l_i) {
      for (std::size_t p_i = 0; p_i < p_count; ++p_i) {
        for (std::size_t rep = 0; rep < reps; ++rep) {
          units.push_back({n_i, l_i, p_i, static_cast<std::int64_t>(rep)});
        }
      }
    }
  }

  std::vector<UnitResult> unit_results(units.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= units.size() || failed.load()) break;
      try {
        const Unit& unit = units[idx];
        const scheme::DemandProfile profile = scheme::DemandProfile::homogeneous(
            grid.n_values[unit.n_i], grid.p_values[unit.p_i],
            grid.lambda_values[unit.l_i], grid.mu);
        const StreamIds ids =
            replication_streams(unit.n_i, unit.l_i, unit.rep);
        dist::RandomStream demand_stream(grid.seed, ids.demand);
        dist::RandomStream thinning_stream(grid.seed, ids.thinning);
        const DemandPaths paths = simulate_demand_paths(
            profile, demand_stream, thinning_stream, grid.periods);

        UnitResult& out = unit_results[idx];
        out.stats = paths.stats;
        out.metrics.reserve(m_count * q_count);
        for (std::size_t m_i = 0; m_i < m_count; ++m_i) {
          const int m = grid.m_values[m_i];
          for (std::size_t q_i = 0; q_i < q_count; ++q_i) {
            const analytics::CostParams cost(grid.r, grid.theta, m,
                                             grid.q_values[q_i]);
            out.metrics.push_back(inventory::run_demand_paths(
                paths.adjusted, profile.n, cost, grid.effective_burn_in(m)));
          }
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        break;
      }
    }
  };

  const int thread_count = resolve_threads(threads, units.size());
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int i = 0; i < thread_count; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Deterministic assembly: replication slots are reduced in order, so the
  // result never depends on thread scheduling.
  auto unit_index = [&](std::size_t n_i, std::size_t l_i, std::size_t p_i,
                        std::size_t rep) {
    return ((n_i * l_count + l_i) * p_count + p_i) * reps + rep;
  };

  std::vector<ResultRow> rows;
  rows.reserve(grid.cell_count());
  for (std::size_t n_i = 0; n_i < n_count; ++n_i) {
    const int n = grid.n_values[n_i];
    for (std::size_t p_i = 0; p_i < p_count; ++p_i) {
      const double p = grid.p_values[p_i];
      for (std::size_t l_i = 0; l_i < l_count; ++l_i) {
        const double lambda = grid.lambda_values[l_i];

        std::vector<double> rep_sigma_np(reps), rep_sigma_rel(reps);
        for (std::size_t rep = 0; rep < reps; ++rep) {
          const UnitResult& u = unit_results[unit_index(n_i, l_i, p_i, rep)];
          rep_sigma_np[rep] = u.stats.avg_variance;
          rep_sigma_rel[rep] = u.stats.relative_variance;
        }

        for (std::size_t m_i = 0; m_i < m_count; ++m_i) {
          const int m = grid.m_values[m_i];
          for (std::size_t q_i = 0; q_i < q_count; ++q_i) {
            const double q = grid.q_values[q_i];
            const std::size_t metric_slot = m_i * q_count + q_i;

            std::vector<double> rep_shortage(reps), rep_wastage(reps),
                rep_cost(reps);
            double single_rep_se = 0.0;
            for (std::size_t rep = 0; rep < reps; ++rep) {
              const UnitResult& u =
                  unit_results[unit_index(n_i, l_i, p_i, rep)];
              const inventory::SimMetrics& metrics = u.metrics[metric_slot];
              rep_shortage[rep] = metrics.mean_shortage;
              rep_wastage[rep] = metrics.mean_wastage;
              rep_cost[rep] = metrics.mean_cost;
              single_rep_se = metrics.std_error_cost;
            }

            ResultRow row{};
            row.n = n;
            row.p = p;
            row.lambda = lambda;
            row.m = m;
            row.q = q;
            row.sigma_np = mean_of(rep_sigma_np);
            row.sigma_rel = mean_of(rep_sigma_rel);
            row.mean_shortage = mean_of(rep_shortage);
            row.mean_wastage = mean_of(rep_wastage);
            row.mean_cost = mean_of(rep_cost);
            if (reps > 1) {
              double m2 = 0.0;
              for (double c : rep_cost) {
                const double d = c - row.mean_cost;
                m2 += d * d;
              }
              row.std_error_cost = std::sqrt(
                  m2 / static_cast<double>(reps - 1) / static_cast<double>(reps));
            } else {
              row.std_error_cost = single_rep_se;
            }
            if (n >= 2) {
              row.sigma_rel_approx = analytics::sigma_rel_approx(
                  analytics::SchemeParams(n, p, lambda, grid.mu));
            } else {
              row.sigma_rel_approx = kNaN;
            }
            if (p == 1.0) {
              const analytics::CostBounds bounds = analytics::cost_bounds(
                  n, lambda, grid.mu,
                  analytics::CostParams(grid.r, grid.theta, m, q));
              row.cost_lb = bounds.cost_lb;
              row.cost_ub = bounds.cost_ub;
            } else {
              row.cost_lb = kNaN;
              row.cost_ub = kNaN;
            }
            rows.push_back(row);
          }
        }
      }
    }
  }
  return rows;
}

Table2Result reproduce_table2(std::uint64_t seed, std::int64_t periods,
                              std::int64_t replications, int threads) {
  ScenarioGrid base;
  base.n_values = {1, 2, 4, 8, 12};
  base.p_values = {1.0};
  base.lambda_values = {10.0};
  base.mu = 10.0;
  base.r = 1.0;
  base.theta = 1.0;
  base.periods = periods;
  base.replications = replications;
  base.seed = seed;

  ScenarioGrid m2 = base;
  m2.m_values = {2};
  m2.q_values = {15.0, 18.0};
  ScenarioGrid m3 = base;
  m3.m_values = {3};
  m3.q_values = {18.0, 22.0};

  std::vector<ResultRow> pool = run_sweep(m2, threads);
  const std::vector<ResultRow> rows3 = run_sweep(m3, threads);
  pool.insert(pool.end(), rows3.begin(), rows3.end());

  const std::pair<int, double> blocks[] = {
      {2, 15.0}, {2, 18.0}, {3, 18.0}, {3, 22.0}};
  Table2Result table;
  for (const auto& [m, q] : blocks) {
    const std::size_t block_start = table.rows.size();
    for (int n : base.n_values) {
      const auto it = std::find_if(pool.begin(), pool.end(), [&](const ResultRow& r) {
        return r.m == m && r.q == q && r.n == n;
      });
      if (it == pool.end()) throw std::logic_error("table2: missing cell");
      table.rows.push_back(*it);
      table.threshold_flag.push_back(false);
    }
    // Underline rule: largest analytic cost_lb in the block still <= 0.01.
    std::size_t best = table.rows.size();
    for (std::size_t i = block_start; i < table.rows.size(); ++i) {
      if (table.rows[i].cost_lb <= 0.01 &&
          (best == table.rows.size() ||
           table.rows[i].cost_lb > table.rows[best].cost_lb)) {
        best = i;
      }
    }
    if (best < table.rows.size()) table.threshold_flag[best] = true;
  }
  return table;
}

namespace {
std::vector<double> p_grid(double step) {
  std::vector<double> values;
  const auto count = static_cast<int>(std::lround(1.0 / step));
  values.reserve(static_cast<std::size_t>(count) + 1);
  for (int j = 0; j <= count; ++j) {
    values.push_back(static_cast<double>(j) / count);
  }
  return values;
}
}  // namespace

ScenarioGrid fig_cv_grid() {
  ScenarioGrid grid;
  grid.n_values = {2};
  grid.lambda_values = {4.0, 10.0, 14.0};
  grid.p_values = p_grid(0.05);
  grid.m_values = {2};
  grid.q_values = {15.0};
  grid.replications = 10;
  return grid;
}

ScenarioGrid fig_npr_grid() {
  ScenarioGrid grid;
  grid.n_values = {2, 4, 8, 12};
  grid.lambda_values = {10.0};
  grid.p_values = p_grid(0.05);
  grid.m_values = {2};
  grid.q_values = {15.0};
  grid.replications = 10;
  return grid;
}

ScenarioGrid fig_cost_grid(int m) {
  if (m < 1) throw std::invalid_argument("fig_cost_grid: m < 1");
  ScenarioGrid grid;
  grid.n_values = {12};
  grid.lambda_values = {10.0};
  grid.p_values = p_grid(0.1);
  grid.m_values = {m};
  const double q_max = m == 2 ? 20.0 : 30.0;
  for (double q = 10.0; q <= q_max + 0.5; q += 1.0) grid.q_values.push_back(q);
  grid.replications = 10;
  return grid;
}

}  // namespace opaque_inv::experiments
