// Acceptance suite: one pass/fail line per criterion, exit 0 only if all
// pass. Tolerances are fixed in this file; runtimes for the timed criteria
// are measured and enforced here as well.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "opaque_inv/analytics.hpp"
#include "opaque_inv/experiments.hpp"
#include "opaque_inv/inventory.hpp"
#include "opaque_inv/scheme.hpp"
#include "oracles.hpp"

using namespace opaque_inv;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool condition, const std::string& message) {
    if (!condition) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += message;
    }
  }
};

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

std::string fmt(const char* format, ...) {
  va_list args;
  va_start(args, format);
  char buffer[512];
  std::vsnprintf(buffer, sizeof buffer, format, args);
  va_end(args);
  return buffer;
}

// Reference comparison table (lambda=10, p=1, mu=10, r=theta=1), blocks in
// (m,q) = (2,15), (2,18), (3,18), (3,22) order, n in {1,2,4,8,12}.
constexpr int kTableN[] = {1, 2, 4, 8, 12};
constexpr double kTableClb[4][5] = {
    {0.2287, 0.0465, 0.0042, 0.0001, 0.0000},
    {0.4759, 0.2434, 0.1080, 0.0363, 0.0156},
    {0.0183, 0.0005, 0.0000, 0.0000, 0.0000},
    {0.0469, 0.0065, 0.0003, 0.0000, 0.0000}};
constexpr double kTableMClb[4][5] = {
    {0.4574, 0.0930, 0.0084, 0.0002, 0.0000},
    {0.9519, 0.4868, 0.2161, 0.0726, 0.0311},
    {0.0549, 0.0016, 0.0000, 0.0000, 0.0000},
    {0.1407, 0.0194, 0.0008, 0.0000, 0.0000}};
constexpr double kTableCost[4][5] = {
    {0.2993, 0.0673, 0.0067, 0.0002, 0.0000},
    {0.6365, 0.3455, 0.1610, 0.0577, 0.0249},
    {0.0249, 0.0006, 0.0000, 0.0000, 0.0000},
    {0.0993, 0.0166, 0.0006, 0.0000, 0.0000}};
constexpr int kTableM[] = {2, 2, 3, 3};
constexpr double kTableQ[] = {15.0, 18.0, 18.0, 22.0};

Outcome criterion1_analytic_table(std::string& timing) {
  Outcome outcome;
  const double t0 = now_seconds();
  for (int block = 0; block < 4; ++block) {
    for (int j = 0; j < 5; ++j) {
      const analytics::CostParams cost(1.0, 1.0, kTableM[block],
                                       kTableQ[block]);
      const auto bounds =
          analytics::cost_bounds(kTableN[j], 10.0, 10.0, cost);
      const double clb_err = std::abs(bounds.cost_lb - kTableClb[block][j]);
      const double mclb_err = std::abs(bounds.cost_ub - kTableMClb[block][j]);
      outcome.require(clb_err <= 5e-5,
                      fmt("C_LB m=%d q=%.0f n=%d err=%.2e", kTableM[block],
                          kTableQ[block], kTableN[j], clb_err));
      outcome.require(mclb_err <= 5e-5,
                      fmt("m*C_LB m=%d q=%.0f n=%d err=%.2e", kTableM[block],
                          kTableQ[block], kTableN[j], mclb_err));
    }
  }
  const double elapsed = now_seconds() - t0;
  outcome.require(elapsed < 1.0, fmt("runtime %.3fs >= 1s", elapsed));
  timing = fmt("%.3fs", elapsed);
  return outcome;
}

// Shared by criteria 2 and 3.
const experiments::Table2Result& simulated_table2() {
  static const experiments::Table2Result table =
      experiments::reproduce_table2(/*seed=*/42, /*periods=*/10000,
                                    /*replications=*/20, /*threads=*/0);
  return table;
}

Outcome criterion2_simulated_table(std::string& timing) {
  Outcome outcome;
  const double t0 = now_seconds();
  const auto& table = simulated_table2();
  for (int block = 0; block < 4; ++block) {
    for (int j = 0; j < 5; ++j) {
      const auto& row = table.rows[block * 5 + j];
      const double tolerance = std::max(0.01, 3.0 * row.std_error_cost);
      const double err = std::abs(row.mean_cost - kTableCost[block][j]);
      outcome.require(err <= tolerance,
                      fmt("E[C] m=%d q=%.0f n=%d sim=%.4f ref=%.4f",
                          row.m, row.q, row.n, row.mean_cost,
                          kTableCost[block][j]));
    }
  }
  const double elapsed = now_seconds() - t0;
  outcome.require(elapsed < 120.0, fmt("runtime %.1fs >= 120s", elapsed));
  timing = fmt("%.2fs", elapsed);
  return outcome;
}

Outcome criterion3_sandwich() {
  Outcome outcome;
  // Cells whose analytic bound is below ~1e-6 see zero cost events in a
  // 20 x 10k-period sample, which collapses the replication SE to zero; the
  // absolute floor covers that event-resolution limit of the estimator.
  constexpr double kResolution = 1e-5;
  for (const auto& row : simulated_table2().rows) {
    const double slack = 4.0 * row.std_error_cost + kResolution;
    outcome.require(row.mean_cost >= row.cost_lb - slack,
                    fmt("below lb: m=%d q=%.0f n=%d", row.m, row.q, row.n));
    outcome.require(row.mean_cost <= row.cost_ub + slack,
                    fmt("above ub: m=%d q=%.0f n=%d", row.m, row.q, row.n));
  }
  return outcome;
}

Outcome criterion4_curve_collapse() {
  Outcome outcome;
  const int batches = 10;
  const int per_batch = 10000;  // 1e5 samples per grid point in total
  std::uint64_t stream_id = 0;
  for (double lambda : {4.0, 10.0, 14.0}) {
    for (int ip = 0; ip <= 10; ++ip) {
      const double p = ip / 10.0;
      const auto profile =
          scheme::DemandProfile::homogeneous(2, p, lambda, 10.0);
      std::vector<double> estimates;
      estimates.reserve(batches);
      for (int b = 0; b < batches; ++b) {
        dist::RandomStream demand(20240, stream_id++);
        dist::RandomStream thinning(20240, stream_id++);
        scheme::DemandStatsAccumulator acc(2);
        for (int t = 0; t < per_batch; ++t) {
          acc.observe(
              scheme::generate_period(profile, demand, thinning).adjusted);
        }
        estimates.push_back(acc.finalize(profile).relative_variance);
      }
      const auto mv = oracles::mean_var(estimates);
      const double se = std::sqrt(mv.variance / batches);
      const analytics::SchemeParams params(2, p, lambda);
      const double approx = analytics::sigma_rel_approx(params);
      const double exact = analytics::sigma_rel_exact(params);
      outcome.require(std::abs(mv.mean - approx) < 0.03,
                      fmt("|emp-approx| lambda=%.0f p=%.1f gap=%.4f", lambda,
                          p, std::abs(mv.mean - approx)));
      outcome.require(std::abs(mv.mean - exact) < 4.0 * se,
                      fmt("|emp-exact| lambda=%.0f p=%.1f gap=%.4f se=%.4f",
                          lambda, p, std::abs(mv.mean - exact), se));
      if (lambda == 4.0 && ip == 3) {  // p/c_v = 0.6
        outcome.require(std::abs(mv.mean - 0.2) < 0.03,
                        fmt("spot p/cv=0.6: emp=%.4f", mv.mean));
      }
    }
  }
  return outcome;
}

Outcome criterion5_threshold() {
  Outcome outcome;
  const auto q15 = analytics::threshold_variance(
      10.0, 10.0, analytics::CostParams(1.0, 1.0, 2, 15.0), 0.01);
  outcome.require(q15 && q15->sigma2_th == 2.5 && q15->n_th == 4,
                  "q=15 m=2 expected (2.5, 4)");
  const auto q18 = analytics::threshold_variance(
      10.0, 10.0, analytics::CostParams(1.0, 1.0, 3, 18.0), 0.01);
  outcome.require(q18 && q18->sigma2_th == 5.0 && q18->n_th == 2,
                  "q=18 m=3 expected (5, 2)");
  const auto q22 = analytics::threshold_variance(
      10.0, 10.0, analytics::CostParams(1.0, 1.0, 3, 22.0), 0.01);
  outcome.require(q22 && q22->sigma2_th == 5.0 && q22->n_th == 2,
                  "q=22 m=3 expected (5, 2)");
  return outcome;
}

Outcome criterion6_bpd_optimality() {
  Outcome outcome;
  dist::RandomStream stream(606060, 0);
  int checked = 0;
  for (int instance = 0; instance < 200; ++instance) {
    const int n = 2 + static_cast<int>(stream.next_u32() % 2);
    const auto profile = scheme::DemandProfile::homogeneous(n, 0.3, 4.0, 10.0);
    std::vector<double> intermediate(static_cast<std::size_t>(n));
    for (double& x : intermediate) {
      x = 2.5 * static_cast<double>(dist::sample_poisson(stream, 2.8));
    }
    const double opaque = 6.0 * stream.next_double();
    const auto adjusted = scheme::bpd_allocate(profile, intermediate, opaque);
    const double mine = oracles::pairwise_objective(adjusted, profile.mu);
    const double best =
        oracles::grid_search_allocation(intermediate, profile.mu, opaque);
    if (mine > best + 1e-6) {
      outcome.require(false, fmt("instance %d: bpd=%.8f grid=%.8f", instance,
                                 mine, best));
    }
    ++checked;
  }
  outcome.require(checked == 200, "expected 200 instances");
  return outcome;
}

Outcome criterion7_property_suite() {
  Outcome outcome;

  // conservation, exact to 1e-9 every period
  {
    dist::RandomStream demand(111, 0), thinning(111, 1);
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const auto profile = scheme::DemandProfile::homogeneous(4, p, 6.0, 10.0);
      for (int t = 0; t < 2000; ++t) {
        const auto period = scheme::generate_period(profile, demand, thinning);
        double original = 0.0, intermediate = 0.0, adjusted = 0.0;
        for (int i = 0; i < 4; ++i) {
          original += period.original[i];
          intermediate += period.intermediate[i];
          adjusted += period.adjusted[i];
        }
        outcome.require(
            std::abs(original - (intermediate + period.opaque)) < 1e-9,
            "conservation: intermediate stage");
        outcome.require(std::abs(original - adjusted) < 1e-9,
                        "conservation: adjusted stage");
        if (!outcome.pass) return outcome;
      }
    }
  }

  // variance sandwich sigma^2/n <= sigma^2_{n,p} <= sigma^2 within 4 SE
  {
    const int n = 3;
    const double lambda = 6.0, mu = 10.0;
    const double sigma2 = mu * mu / lambda;
    std::uint64_t sid = 0;
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const auto profile = scheme::DemandProfile::homogeneous(n, p, lambda, mu);
      std::vector<double> estimates;
      for (int b = 0; b < 8; ++b) {
        dist::RandomStream demand(222, sid++), thinning(222, sid++);
        scheme::DemandStatsAccumulator acc(n);
        for (int t = 0; t < 12500; ++t) {
          acc.observe(
              scheme::generate_period(profile, demand, thinning).adjusted);
        }
        estimates.push_back(acc.finalize(profile).avg_variance);
      }
      const auto mv = oracles::mean_var(estimates);
      const double se = std::sqrt(mv.variance / estimates.size());
      outcome.require(mv.mean >= sigma2 / n - 4.0 * se,
                      fmt("sandwich lower, p=%.2f", p));
      outcome.require(mv.mean <= sigma2 + 4.0 * se,
                      fmt("sandwich upper, p=%.2f", p));
    }
  }

  // involution identity to 1e-12
  for (int n : {2, 4, 8, 12}) {
    for (int i = 0; i <= 100; ++i) {
      const double x = i / 100.0;
      const double roundtrip =
          analytics::rel_from_rho(n, analytics::rho_from_rel(n, x));
      outcome.require(std::abs(roundtrip - x) < 1e-12, "involution identity");
    }
  }

  // full-pooling sample-mean identity to 1e-9
  {
    dist::RandomStream demand(333, 0), thinning(333, 1);
    const auto profile = scheme::DemandProfile::homogeneous(4, 1.0, 10.0, 10.0);
    for (int t = 0; t < 10000; ++t) {
      const auto period = scheme::generate_period(profile, demand, thinning);
      double mean = 0.0;
      for (double d : period.original) mean += d;
      mean /= 4.0;
      for (double d : period.adjusted) {
        outcome.require(std::abs(d - mean) < 1e-9, "full-pooling identity");
      }
      if (!outcome.pass) return outcome;
    }
  }

  // deterministic demand at q = mu costs exactly zero
  {
    const analytics::CostParams cost(1.0, 1.0, 2, 10.0);
    inventory::InventoryState state(2);
    double total = 0.0;
    for (int t = 0; t < 1000; ++t) {
      total += inventory::step(state, 10.0, cost).cost;
    }
    outcome.require(total == 0.0, "deterministic-demand zero cost");
  }

  // cost monotone in p under common random numbers, within 4 SE
  {
    const analytics::CostParams cost(1.0, 1.0, 2, 15.0);
    const std::vector<double> p_values{0.0, 0.25, 0.5, 0.75, 1.0};
    const int reps = 8;
    std::vector<std::vector<double>> costs(p_values.size());
    for (std::size_t pi = 0; pi < p_values.size(); ++pi) {
      const auto profile =
          scheme::DemandProfile::homogeneous(4, p_values[pi], 10.0, 10.0);
      for (int rep = 0; rep < reps; ++rep) {
        dist::RandomStream demand(444, 2 * static_cast<std::uint64_t>(rep));
        dist::RandomStream thinning(444,
                                    2 * static_cast<std::uint64_t>(rep) + 1);
        costs[pi].push_back(
            inventory::run_replication(profile, cost, demand, thinning, 8000,
                                       100)
                .mean_cost);
      }
    }
    for (std::size_t pi = 0; pi + 1 < p_values.size(); ++pi) {
      std::vector<double> diffs;
      for (int rep = 0; rep < reps; ++rep) {
        diffs.push_back(costs[pi + 1][rep] - costs[pi][rep]);
      }
      const auto mv = oracles::mean_var(diffs);
      const double se = std::sqrt(mv.variance / diffs.size());
      outcome.require(mv.mean <= 4.0 * se,
                      fmt("monotone cost: p %.2f -> %.2f", p_values[pi],
                          p_values[pi + 1]));
    }
  }
  return outcome;
}

Outcome criterion8_insensitivity() {
  Outcome outcome;
  double worst = 0.0;
  double worst_q = 0.0;
  auto probe = [&](double q) {
    const double value =
        analytics::cost_bounds(120, 10.0, 10.0,
                               analytics::CostParams(1.0, 1.0, 2, q))
            .cost_lb;
    if (value > worst) {
      worst = value;
      worst_q = q;
    }
  };
  for (double q = 12.0; q <= 18.0 + 1e-9; q += 0.005) probe(q);
  for (int k = 1440; k <= 2160; ++k) probe(k / 120.0);
  outcome.require(worst < 0.01,
                  fmt("max C_LB %.6f at q=%.4f", worst, worst_q));
  return outcome;
}

Outcome criterion9_determinism() {
  Outcome outcome;
  experiments::ScenarioGrid grid;
  grid.n_values = {2, 4};
  grid.p_values = {0.0, 0.5, 1.0};
  grid.lambda_values = {10.0};
  grid.m_values = {2};
  grid.q_values = {15.0, 18.0};
  grid.periods = 3000;
  grid.replications = 3;
  grid.seed = 31415;

  const std::string serial = experiments::to_csv(experiments::run_sweep(grid, 1));
  const std::string threaded_a =
      experiments::to_csv(experiments::run_sweep(grid, 4));
  const std::string threaded_b =
      experiments::to_csv(experiments::run_sweep(grid, 4));
  outcome.require(serial == threaded_a, "serial vs 4-thread CSV differs");
  outcome.require(threaded_a == threaded_b, "repeated 4-thread CSV differs");

  experiments::emit_csv(experiments::run_sweep(grid, 4),
                        "/tmp/opaque_inv_acceptance_a.csv");
  experiments::emit_csv(experiments::run_sweep(grid, 4),
                        "/tmp/opaque_inv_acceptance_b.csv");
  std::ifstream fa("/tmp/opaque_inv_acceptance_a.csv", std::ios::binary);
  std::ifstream fb("/tmp/opaque_inv_acceptance_b.csv", std::ios::binary);
  const std::string file_a((std::istreambuf_iterator<char>(fa)),
                           std::istreambuf_iterator<char>());
  const std::string file_b((std::istreambuf_iterator<char>(fb)),
                           std::istreambuf_iterator<char>());
  outcome.require(!file_a.empty() && file_a == file_b,
                  "emitted CSV files differ");
  return outcome;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* title;
    Outcome outcome;
    std::string timing;
  };
  std::vector<Entry> entries;

  {
    Entry e{1, "analytic comparison-table reproduction (20 cells, <1s)", {}, ""};
    e.outcome = criterion1_analytic_table(e.timing);
    entries.push_back(e);
  }
  {
    Entry e{2, "simulated comparison-table reproduction (20 reps x 10k periods)",
            {}, ""};
    e.outcome = criterion2_simulated_table(e.timing);
    entries.push_back(e);
  }
  entries.push_back({3, "cost sandwich lb-4SE <= E[C] <= ub+4SE on all cells",
                     criterion3_sandwich(), ""});
  entries.push_back({4, "relative-variance curve collapse (n=2, 3 lambdas, 11 p)",
                     criterion4_curve_collapse(), ""});
  entries.push_back(
      {5, "threshold variance (2.5 at q15/m2; 5 at q18,q22/m3)",
       criterion5_threshold(), ""});
  entries.push_back({6, "BPD allocator optimal vs grid oracle (200 instances)",
                     criterion6_bpd_optimality(), ""});
  entries.push_back({7, "property suite (conservation, sandwich, involution, "
                        "pooling, zero-cost, monotone)",
                     criterion7_property_suite(), ""});
  entries.push_back({8, "cost insensitivity on q in [12,18] at n*lambda=1200",
                     criterion8_insensitivity(), ""});
  entries.push_back({9, "byte-identical CSV across runs and thread counts",
                     criterion9_determinism(), ""});

  bool all_pass = true;
  for (const Entry& e : entries) {
    const bool pass = e.outcome.pass;
    all_pass = all_pass && pass;
    std::printf("[%s] criterion %d: %s", pass ? "PASS" : "FAIL", e.id, e.title);
    if (!e.timing.empty()) std::printf(" [%s]", e.timing.c_str());
    if (!pass) std::printf(" -- %s", e.outcome.detail.c_str());
    std::printf("\n");
  }
  return all_pass ? 0 : 1;
}
