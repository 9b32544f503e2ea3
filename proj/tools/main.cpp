// Command-line front end: analytic formulas, simulation sweeps, threshold
// search, and canned reproduction grids.
//
// Exit codes: 0 success, 1 runtime/I-O failure, 2 usage or validation error.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "opaque_inv/analytics.hpp"
#include "opaque_inv/experiments.hpp"

namespace {

namespace analytics = opaque_inv::analytics;
namespace experiments = opaque_inv::experiments;

struct SimulateOptions {
  std::string config_path;
  std::vector<int> n_values;
  std::vector<double> p_values;
  std::vector<double> lambda_values;
  std::vector<int> m_values;
  std::vector<double> q_values;
  double mu = -1.0;
  double r = -1.0;
  double theta = -1.0;
  std::int64_t periods = -1;
  std::int64_t replications = -1;
  std::int64_t burn_in = -2;  // -2: unset, -1: auto
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string out_path;
  std::string format = "csv";
  bool verbose = false;
};

template <typename T>
void merge_list(const nlohmann::json& config, const char* key,
                std::vector<T>& target) {
  if (!config.contains(key)) return;
  const nlohmann::json& value = config.at(key);
  target.clear();
  if (value.is_array()) {
    for (const auto& item : value) target.push_back(item.get<T>());
  } else {
    target.push_back(value.get<T>());
  }
}

experiments::ScenarioGrid build_grid(const SimulateOptions& opt) {
  experiments::ScenarioGrid grid;
  grid.n_values.clear();
  grid.p_values.clear();
  grid.lambda_values.clear();
  grid.m_values.clear();
  grid.q_values.clear();

  SimulateOptions merged = opt;
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) {
      throw std::runtime_error("cannot read config: " + opt.config_path);
    }
    nlohmann::json config = nlohmann::json::parse(in);

    SimulateOptions from_file;
    merge_list(config, "n", from_file.n_values);
    merge_list(config, "p", from_file.p_values);
    merge_list(config, "lambda", from_file.lambda_values);
    merge_list(config, "m", from_file.m_values);
    merge_list(config, "q", from_file.q_values);
    if (config.contains("mu")) from_file.mu = config["mu"].get<double>();
    if (config.contains("r")) from_file.r = config["r"].get<double>();
    if (config.contains("theta")) from_file.theta = config["theta"].get<double>();
    if (config.contains("periods")) {
      from_file.periods = config["periods"].get<std::int64_t>();
    }
    if (config.contains("replications")) {
      from_file.replications = config["replications"].get<std::int64_t>();
    }
    if (config.contains("burn_in")) {
      from_file.burn_in = config["burn_in"].get<std::int64_t>();
    }
    if (config.contains("seed")) {
      from_file.seed = config["seed"].get<std::uint64_t>();
    }
    if (config.contains("out")) from_file.out_path = config["out"].get<std::string>();
    if (config.contains("format")) {
      from_file.format = config["format"].get<std::string>();
    }

    // Flags override file values.
    if (merged.n_values.empty()) merged.n_values = from_file.n_values;
    if (merged.p_values.empty()) merged.p_values = from_file.p_values;
    if (merged.lambda_values.empty()) merged.lambda_values = from_file.lambda_values;
    if (merged.m_values.empty()) merged.m_values = from_file.m_values;
    if (merged.q_values.empty()) merged.q_values = from_file.q_values;
    if (merged.mu < 0.0) merged.mu = from_file.mu;
    if (merged.r < 0.0) merged.r = from_file.r;
    if (merged.theta < 0.0) merged.theta = from_file.theta;
    if (merged.periods < 0) merged.periods = from_file.periods;
    if (merged.replications < 0) merged.replications = from_file.replications;
    if (merged.burn_in == -2) merged.burn_in = from_file.burn_in;
    if (!merged.seed) merged.seed = from_file.seed;
    if (merged.out_path.empty()) merged.out_path = from_file.out_path;
    if (merged.format == "csv" && from_file.format != "csv" &&
        !from_file.format.empty()) {
      merged.format = from_file.format;
    }
  }

  for (const char* missing :
       {merged.n_values.empty() ? "n" : nullptr,
        merged.p_values.empty() ? "p" : nullptr,
        merged.lambda_values.empty() ? "lambda" : nullptr,
        merged.m_values.empty() ? "m" : nullptr,
        merged.q_values.empty() ? "q" : nullptr}) {
    if (missing != nullptr) {
      throw std::invalid_argument(std::string("simulate: missing required --") +
                                  missing);
    }
  }

  grid.n_values = merged.n_values;
  grid.p_values = merged.p_values;
  grid.lambda_values = merged.lambda_values;
  grid.m_values = merged.m_values;
  grid.q_values = merged.q_values;
  if (merged.mu >= 0.0) grid.mu = merged.mu;
  if (merged.r >= 0.0) grid.r = merged.r;
  if (merged.theta >= 0.0) grid.theta = merged.theta;
  if (merged.periods >= 0) grid.periods = merged.periods;
  if (merged.replications >= 0) grid.replications = merged.replications;
  if (merged.burn_in != -2) grid.burn_in = merged.burn_in;
  if (merged.seed) grid.seed = *merged.seed;
  return grid;
}

void echo_grid(const experiments::ScenarioGrid& grid, int threads,
               const std::string& out, const std::string& format) {
  auto join_ints = [](const std::vector<int>& v) {
    std::string s;
    for (int x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
    return s;
  };
  auto join = [](const std::vector<double>& v) {
    std::string s;
    char buf[32];
    for (double x : v) {
      std::snprintf(buf, sizeof buf, "%g", x);
      s += (s.empty() ? "" : ",") + std::string(buf);
    }
    return s;
  };
  std::cerr << "config: n=[" << join_ints(grid.n_values) << "] p=["
            << join(grid.p_values) << "] lambda=[" << join(grid.lambda_values)
            << "] m=[" << join_ints(grid.m_values) << "] q=["
            << join(grid.q_values) << "] mu=" << grid.mu << " r=" << grid.r
            << " theta=" << grid.theta << " periods=" << grid.periods
            << " replications=" << grid.replications << " burn_in="
            << grid.burn_in << " seed=" << grid.seed << " threads=" << threads
            << " out=" << out << " format=" << format << "\n";
}

void write_rows(const std::vector<experiments::ResultRow>& rows,
                const std::filesystem::path& path, const std::string& format) {
  if (format == "json") {
    experiments::emit_json(rows, path);
  } else {
    experiments::emit_csv(rows, path);
  }
}

void print_summaries(const std::vector<experiments::ResultRow>& rows) {
  for (const auto& row : rows) {
    std::printf(
        "n=%d p=%.3f lambda=%.3f m=%d q=%.3f -> shortage=%.6f wastage=%.6f "
        "cost=%.6f se=%.6f\n",
        row.n, row.p, row.lambda, row.m, row.q, row.mean_shortage,
        row.mean_wastage, row.mean_cost, row.std_error_cost);
  }
}

int run_app(int argc, char** argv) {
  CLI::App app{
      "Opaque selling scheme toolkit for perishable base-stock inventory "
      "systems"};
  app.require_subcommand(1);

  // ---- analytic ----------------------------------------------------------
  CLI::App* analytic = app.add_subcommand(
      "analytic", "Closed-form quantities (cost bounds, relative variance)");
  analytic->require_subcommand(1);

  struct {
    int n = 1;
    double lambda = 10.0, mu = 10.0, q = 0.0, r = 1.0, theta = 1.0;
    int m = 2;
  } clb_opt;
  CLI::App* clb = analytic->add_subcommand(
      "clb", "Cost lower/upper bound for the full-opaque scheme");
  clb->add_option("--n", clb_opt.n, "number of non-opaque products")->required();
  clb->add_option("--lambda", clb_opt.lambda, "base Poisson parameter");
  clb->add_option("--mu", clb_opt.mu, "mean demand per product");
  clb->add_option("--q", clb_opt.q, "base-stock level")->required();
  clb->add_option("--m", clb_opt.m, "shelflife in periods")->required();
  clb->add_option("--r", clb_opt.r, "per-unit shortage cost");
  clb->add_option("--theta", clb_opt.theta, "per-unit wastage cost");
  clb->callback([&] {
    const analytics::CostParams cost(clb_opt.r, clb_opt.theta, clb_opt.m,
                                     clb_opt.q);
    const analytics::CostBounds bounds =
        analytics::cost_bounds(clb_opt.n, clb_opt.lambda, clb_opt.mu, cost);
    std::printf(
        "cost_lb=%.6f cost_ub=%.6f expected_shortage=%.6f wastage_lb=%.6f "
        "wastage_ub=%.6f s=%" PRId64 "\n",
        bounds.cost_lb, bounds.cost_ub, bounds.expected_shortage,
        bounds.wastage_lb, bounds.wastage_ub, bounds.s_threshold);
  });

  struct {
    double p = 0.0, lambda = 10.0, mass_tol = 1e-12;
    bool exact = false;
  } sr_opt;
  CLI::App* sigma_rel = analytic->add_subcommand(
      "sigma-rel", "Relative variance of adjusted demands");
  sigma_rel->add_option("--p", sr_opt.p, "opaque proportion")->required();
  sigma_rel->add_option("--lambda", sr_opt.lambda, "base Poisson parameter");
  sigma_rel->add_flag("--exact", sr_opt.exact,
                      "also evaluate the exact two-product value");
  sigma_rel->add_option("--mass-tol", sr_opt.mass_tol,
                        "marginal truncation mass for the exact sum");
  sigma_rel->callback([&] {
    const analytics::SchemeParams params(2, sr_opt.p, sr_opt.lambda);
    std::printf("alpha=%.6f sigma_rel_approx=%.6f", params.alpha(),
                analytics::sigma_rel_approx(params));
    if (sr_opt.exact) {
      std::printf(" sigma_rel_exact=%.6f",
                  analytics::sigma_rel_exact(params, sr_opt.mass_tol));
    }
    std::printf("\n");
  });

  struct {
    int n = 1;
    double lambda = 10.0, mu = 10.0, q = 0.0;
  } shortage_opt;
  CLI::App* shortage =
      analytic->add_subcommand("shortage", "Expected per-period shortage");
  shortage->add_option("--n", shortage_opt.n)->required();
  shortage->add_option("--lambda", shortage_opt.lambda);
  shortage->add_option("--mu", shortage_opt.mu);
  shortage->add_option("--q", shortage_opt.q)->required();
  shortage->callback([&] {
    std::printf("expected_shortage=%.6f\n",
                analytics::expected_shortage(shortage_opt.n, shortage_opt.lambda,
                                             shortage_opt.mu, shortage_opt.q));
  });

  struct {
    int n = 1, m = 2;
    double lambda = 10.0, mu = 10.0, q = 0.0;
  } wastage_opt;
  CLI::App* wastage =
      analytic->add_subcommand("wastage", "Expected per-period wastage bounds");
  wastage->add_option("--n", wastage_opt.n)->required();
  wastage->add_option("--lambda", wastage_opt.lambda);
  wastage->add_option("--mu", wastage_opt.mu);
  wastage->add_option("--q", wastage_opt.q)->required();
  wastage->add_option("--m", wastage_opt.m)->required();
  wastage->callback([&] {
    const auto [lb, ub] =
        analytics::wastage_bounds(wastage_opt.n, wastage_opt.lambda,
                                  wastage_opt.mu, wastage_opt.q, wastage_opt.m);
    std::printf("wastage_lb=%.6f wastage_ub=%.6f\n", lb, ub);
  });

  // ---- simulate -----------------------------------------------------------
  SimulateOptions sim_opt;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Run a Monte Carlo scenario grid");
  simulate->add_option("--config", sim_opt.config_path,
                       "JSON config file; flags override its values");
  simulate->add_option("--n", sim_opt.n_values, "product counts")
      ->delimiter(',');
  simulate->add_option("--p", sim_opt.p_values, "opaque proportions")
      ->delimiter(',');
  simulate->add_option("--lambda", sim_opt.lambda_values,
                       "base Poisson parameters")
      ->delimiter(',');
  simulate->add_option("--m", sim_opt.m_values, "shelflives")->delimiter(',');
  simulate->add_option("--q", sim_opt.q_values, "base-stock levels")
      ->delimiter(',');
  simulate->add_option("--mu", sim_opt.mu, "mean demand (default 10)");
  simulate->add_option("--r", sim_opt.r, "shortage cost (default 1)");
  simulate->add_option("--theta", sim_opt.theta, "wastage cost (default 1)");
  simulate->add_option("--periods", sim_opt.periods,
                       "periods per replication (default 10000)");
  simulate->add_option("--reps", sim_opt.replications,
                       "replications per cell (default 1)");
  simulate->add_option("--burn-in", sim_opt.burn_in,
                       "burn-in periods; -1 selects max(100, 5m)");
  std::uint64_t seed_flag = 0;
  CLI::Option* seed_opt =
      simulate->add_option("--seed", seed_flag, "random seed (default 12345)");
  simulate->add_option("--threads", sim_opt.threads,
                       "worker threads; 0 = machine parallelism")
      ->envname("OPAQUE_INV_THREADS");
  simulate->add_option("--out", sim_opt.out_path,
                       "output file (default results.csv/.json)");
  simulate->add_option("--format", sim_opt.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  simulate->add_flag("-v,--verbose", sim_opt.verbose,
                     "echo the resolved config to stderr");
  simulate->callback([&] {
    if (seed_opt->count() > 0) sim_opt.seed = seed_flag;
    const experiments::ScenarioGrid grid = build_grid(sim_opt);
    std::string out = sim_opt.out_path;
    if (out.empty()) {
      out = sim_opt.format == "json" ? "results.json" : "results.csv";
    }
    if (sim_opt.verbose) echo_grid(grid, sim_opt.threads, out, sim_opt.format);
    const std::vector<experiments::ResultRow> rows =
        experiments::run_sweep(grid, sim_opt.threads);
    write_rows(rows, out, sim_opt.format);
    print_summaries(rows);
    std::fprintf(stderr, "wrote %zu rows to %s\n", rows.size(), out.c_str());
  });

  // ---- threshold ----------------------------------------------------------
  struct {
    double q = 0.0, lambda = 10.0, mu = 10.0, r = 1.0, theta = 1.0,
           delta = 0.01;
    int m = 2, n_max = 64;
  } th_opt;
  CLI::App* threshold = app.add_subcommand(
      "threshold", "Threshold variance search (largest pooled variance with "
                   "cost lower bound below delta)");
  threshold->add_option("--q", th_opt.q)->required();
  threshold->add_option("--m", th_opt.m)->required();
  threshold->add_option("--lambda", th_opt.lambda);
  threshold->add_option("--mu", th_opt.mu);
  threshold->add_option("--r", th_opt.r);
  threshold->add_option("--theta", th_opt.theta);
  threshold->add_option("--delta", th_opt.delta);
  threshold->add_option("--n-max", th_opt.n_max);
  threshold->callback([&] {
    const analytics::CostParams cost(th_opt.r, th_opt.theta, th_opt.m,
                                     th_opt.q);
    const auto result = analytics::threshold_variance(
        th_opt.lambda, th_opt.mu, cost, th_opt.delta, th_opt.n_max);
    const int last = result ? result->n_th : th_opt.n_max;
    std::printf("%4s %12s %12s\n", "n", "sigma2_n1", "cost_lb");
    for (int n = 2; n <= last; ++n) {
      const analytics::CostBounds bounds =
          analytics::cost_bounds(n, th_opt.lambda, th_opt.mu, cost);
      std::printf("%4d %12.6f %12.6f\n", n,
                  th_opt.mu * th_opt.mu / (n * th_opt.lambda), bounds.cost_lb);
    }
    if (result) {
      std::printf("sigma2_th=%.6f n_th=%d\n", result->sigma2_th, result->n_th);
    } else {
      std::printf("none <= n_max=%d\n", th_opt.n_max);
    }
  });

  // ---- reproduce ----------------------------------------------------------
  struct {
    std::string preset;
    int m = 2;
    std::int64_t periods = 10000;
    std::int64_t replications = -1;
    std::uint64_t seed = 12345;
    int threads = 0;
    std::string out_dir = ".";
    std::string format = "csv";
  } rep_opt;
  CLI::App* reproduce =
      app.add_subcommand("reproduce", "Canned reproduction grids");
  reproduce
      ->add_option("preset", rep_opt.preset,
                   "one of: table2, fig-cv, fig-npr, fig-cost")
      ->required()
      ->check(CLI::IsMember({"table2", "fig-cv", "fig-npr", "fig-cost"}));
  reproduce->add_option("--m", rep_opt.m, "shelflife for fig-cost");
  reproduce->add_option("--periods", rep_opt.periods);
  reproduce->add_option("--reps", rep_opt.replications,
                        "replications (default 20 for table2, 10 otherwise)");
  reproduce->add_option("--seed", rep_opt.seed);
  reproduce->add_option("--threads", rep_opt.threads)
      ->envname("OPAQUE_INV_THREADS");
  reproduce->add_option("--out", rep_opt.out_dir, "output directory");
  reproduce->add_option("--format", rep_opt.format)
      ->check(CLI::IsMember({"csv", "json"}));
  reproduce->callback([&] {
    const std::filesystem::path dir(rep_opt.out_dir);
    const std::string ext = rep_opt.format == "json" ? ".json" : ".csv";
    if (rep_opt.preset == "table2") {
      const std::int64_t reps =
          rep_opt.replications > 0 ? rep_opt.replications : 20;
      const experiments::Table2Result table = experiments::reproduce_table2(
          rep_opt.seed, rep_opt.periods, reps, rep_opt.threads);
      const std::filesystem::path path = dir / ("table2" + ext);
      if (rep_opt.format == "json") {
        experiments::emit_json(table, path);
      } else {
        experiments::emit_csv(table, path);
      }
      print_summaries(table.rows);
      std::fprintf(stderr, "wrote %s\n", path.string().c_str());
      return;
    }
    experiments::ScenarioGrid grid;
    std::string stem;
    if (rep_opt.preset == "fig-cv") {
      grid = experiments::fig_cv_grid();
      stem = "fig_cv";
    } else if (rep_opt.preset == "fig-npr") {
      grid = experiments::fig_npr_grid();
      stem = "fig_npr";
    } else {
      grid = experiments::fig_cost_grid(rep_opt.m);
      stem = "fig_cost_m" + std::to_string(rep_opt.m);
    }
    grid.seed = rep_opt.seed;
    grid.periods = rep_opt.periods;
    if (rep_opt.replications > 0) grid.replications = rep_opt.replications;
    const std::vector<experiments::ResultRow> rows =
        experiments::run_sweep(grid, rep_opt.threads);
    const std::filesystem::path path = dir / (stem + ext);
    write_rows(rows, path, rep_opt.format);
    print_summaries(rows);
    std::fprintf(stderr, "wrote %s\n", path.string().c_str());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run_app(argc, argv); }
