#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairloc/bench.hpp"
#include "fairloc/lp.hpp"
#include "fairloc/oracle.hpp"

namespace {

using namespace fairloc;

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

// Raw flag values, applied over the config file in a fixed order.
struct Flags {
  std::string config;
  std::map<std::string, std::string> scalars;
  std::vector<std::string> algos;
  std::vector<std::string> pcts;
};

void add_scalar(CLI::App* cmd, Flags& flags, const std::string& key, const std::string& help) {
  cmd->add_option_function<std::string>(
      "--" + key, [&flags, key](const std::string& v) { flags.scalars[key] = v; }, help);
}

void add_dataset_flags(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config, "Key-value config file (flags override it)");
  add_scalar(cmd, flags, "dataset", "synthetic, a CSV path, or an instance file");
  add_scalar(cmd, flags, "group-col", "Group column of a CSV dataset");
  add_scalar(cmd, flags, "delimiter", "CSV delimiter (default ',')");
  add_scalar(cmd, flags, "n", "Clients sampled from a CSV (default min(4500, rows))");
  add_scalar(cmd, flags, "m", "Facilities (k-means centers or synthetic draws)");
  add_scalar(cmd, flags, "seed", "Random seed");
  add_scalar(cmd, flags, "facility-cost", "uniform_dmax, from_data, or a fixed number");
  for (const char* key : {"n-in", "n-out", "in-sigma", "out-mean", "out-sigma", "cost-near",
                          "cost-far", "radius"}) {
    add_scalar(cmd, flags, key, "Synthetic generator parameter");
  }
}

void add_run_flags(CLI::App* cmd, Flags& flags) {
  add_dataset_flags(cmd, flags);
  add_scalar(cmd, flags, "problem", "fl or kmedian");
  cmd->add_option("--algo", flags.algos,
                  "lpr-f, lpr-nf, gdf-f, gdf-nf, rls-f, rls-nf, ls-nf (repeatable)")
      ->delimiter(',');
  cmd->add_option("--pct", flags.pcts, "Outlier percentage (repeatable)")->delimiter(',');
  add_scalar(cmd, flags, "group-budgets", "Explicit per-group budgets, comma separated");
  add_scalar(cmd, flags, "epsilon", "Rounding epsilon in (0, 0.5]");
  add_scalar(cmd, flags, "gamma", "Penalty trade-off gamma > 0");
  add_scalar(cmd, flags, "eps-guess", "Guess grid ratio minus one");
  add_scalar(cmd, flags, "k", "Facilities opened by k-median algorithms");
  add_scalar(cmd, flags, "jobs", "Concurrent sweep cells");
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : ",") + x;
  return out;
}

SweepConfig resolve(const Flags& flags, const std::string& out) {
  SweepConfig cfg;
  if (!flags.config.empty()) apply_config_file(flags.config, cfg);
  for (const auto& [key, value] : flags.scalars) {
    try {
      apply_config_value(key, value, cfg);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("--") + e.what());
    }
  }
  if (!flags.algos.empty()) apply_config_value("algo", join(flags.algos), cfg);
  if (!flags.pcts.empty()) apply_config_value("pct", join(flags.pcts), cfg);
  if (!out.empty()) cfg.out = out;
  if (!cfg.algorithms_set) cfg.algorithms = default_algorithms(cfg.problem);
  validate(cfg);
  return cfg;
}

// Writes to cfg.out, or stdout when it is empty or "-".
template <typename Fn>
void emit(const std::string& path, Fn&& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream file(path);
  if (!file) throw ConfigError("cannot write '" + path + "'");
  body(file);
}

void cmd_sweep(const SweepConfig& cfg) {
  const LabeledInstance data = load_dataset(cfg);
  const auto records = run_sweep(data, cfg);
  emit(cfg.out, [&](std::ostream& os) {
    write_config_header(os, cfg);
    write_records(os, records);
  });
}

void cmd_solve(const SweepConfig& cfg) {
  if (cfg.algorithms.size() != 1) throw ConfigError("solve takes exactly one --algo");
  if (cfg.percentages.size() != 1 && cfg.group_budgets.empty()) {
    throw ConfigError("solve takes exactly one --pct or --group-budgets");
  }
  const LabeledInstance data = load_dataset(cfg);
  const double pct = cfg.percentages.empty() ? 0.0 : cfg.percentages.front();
  const OutlierBudgets budgets = cell_budgets(cfg, data.instance, pct);
  const CellResult cell = run_cell(data, cfg, cfg.algorithms.front(), pct, budgets);
  emit(cfg.out, [&](std::ostream& os) {
    write_config_header(os, cfg);
    os << "# open =";
    for (int i : cell.solution.open) os << ' ' << i;
    os << '\n';
    write_records(os, {cell.record});
  });
}

void cmd_oracle(const SweepConfig& cfg) {
  const LabeledInstance data = load_dataset(cfg);
  std::vector<SweepRecord> records;
  const std::vector<double> pcts =
      cfg.group_budgets.empty() ? cfg.percentages : std::vector<double>{0.0};
  for (double pct : pcts) {
    const OutlierBudgets budgets = cell_budgets(cfg, data.instance, pct);
    const auto start = std::chrono::steady_clock::now();
    const bool km = cfg.problem == Problem::kKMedian;
    const IntegralSolution sol =
        km ? exact_kmfo(data.instance, budgets, cfg.k) : exact_flfo(data.instance, budgets);
    SweepRecord r = summarize(data, km ? Objective::kKMedian : Objective::kFacilityLocation, pct,
                              budgets, sol, cfg.seed);
    r.name = "exact";
    r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
               .count();
    records.push_back(std::move(r));
  }
  emit(cfg.out, [&](std::ostream& os) {
    write_config_header(os, cfg);
    write_records(os, records);
  });
}

void cmd_generate(const SweepConfig& cfg) {
  if (cfg.out.empty()) throw ConfigError("generate needs --out");
  write_instance(load_dataset(cfg), cfg.out);
}

void cmd_gap_demo(double f, int M) {
  const auto start = std::chrono::steady_clock::now();
  const GapInstance gap = build_gap_instance(f, M);
  const double lp =
      solve_flfo_lp(gap.instance, gap.budgets, BudgetMode::kPerGroup).solution.objective_value;
  const IntegralSolution exact = exact_flfo(gap.instance, gap.budgets);
  const double integral = solution_cost(gap.instance, exact, Objective::kFacilityLocation);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  std::printf("f = %g\nM = %d\nlp_objective = %.9g\nintegral_cost = %.9g\nratio = %.9g\nms = %.3f\n",
              f, M, lp, integral, integral / lp, ms);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Facility location and k-median with fair outliers"};
  app.require_subcommand(1);
  app.footer(std::string("CSV columns: ") + kCsvHeader +
             "\nOne row per group, then a summary row with group 'all'.\n"
             "Exit codes: 0 success, 2 config error, 3 solver error.");

  Flags flags;
  std::string out;

  auto* sweep = app.add_subcommand("sweep", "Run every (algorithm, percentage) cell");
  add_run_flags(sweep, flags);
  sweep->add_option("--out", out, "Output CSV (default stdout)");

  auto* solve = app.add_subcommand("solve", "Run one algorithm at one percentage");
  add_run_flags(solve, flags);
  solve->add_option("--out", out, "Output CSV (default stdout)");

  auto* oracle = app.add_subcommand("oracle", "Exact solution by enumeration (m <= 20)");
  add_run_flags(oracle, flags);
  oracle->add_option("--out", out, "Output CSV (default stdout)");

  auto* generate = app.add_subcommand("generate", "Write an instance file");
  add_dataset_flags(generate, flags);
  generate->add_option("--out", out, "Instance file path")->required();

  double gap_f = 100.0;
  int gap_m = 100;
  auto* gap = app.add_subcommand("gap-demo", "LP value versus integral optimum on the gap family");
  gap->add_option("--f", gap_f, "Facility opening cost")->check(CLI::PositiveNumber);
  gap->add_option("--M", gap_m, "Number of co-located clients")->check(CLI::Range(2, 1 << 20));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gap) {
      cmd_gap_demo(gap_f, gap_m);
    } else if (*generate) {
      cmd_generate(resolve(flags, out));
    } else if (*sweep) {
      cmd_sweep(resolve(flags, out));
    } else if (*solve) {
      cmd_solve(resolve(flags, out));
    } else if (*oracle) {
      cmd_oracle(resolve(flags, out));
    }
  } catch (const InputError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  }
  return 0;
}
