#include "fairloc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "fairloc/greedy_dual.hpp"
#include "fairloc/kmedian.hpp"
#include "fairloc/lp.hpp"
#include "fairloc/rounding.hpp"

namespace fairloc {

namespace {

struct AlgoName {
  Algorithm algo;
  const char* name;
  Problem problem;
};

constexpr AlgoName kAlgos[] = {
    {Algorithm::kLprF, "lpr-f", Problem::kFacilityLocation},
    {Algorithm::kLprNf, "lpr-nf", Problem::kFacilityLocation},
    {Algorithm::kGdfF, "gdf-f", Problem::kFacilityLocation},
    {Algorithm::kGdfNf, "gdf-nf", Problem::kFacilityLocation},
    {Algorithm::kRlsF, "rls-f", Problem::kKMedian},
    {Algorithm::kRlsNf, "rls-nf", Problem::kKMedian},
    {Algorithm::kLsNf, "ls-nf", Problem::kKMedian},
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("invalid value for '" + key + "': '" + raw + "'");
  }
  return v;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& xs, auto&& to_str) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += to_str(xs[i]);
  }
  return out;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

// Runs fn(0..count-1) on up to `jobs` threads; rethrows the first failure.
template <typename Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
  const int workers = std::max(1, std::min(jobs, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i; (i = next++) < count;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

bool looks_like_instance_file(const std::string& path) {
  std::ifstream in(path);
  std::string first;
  if (!in || !std::getline(in, first)) return false;
  return first.rfind("#groups", 0) == 0 || first.rfind("kind,group,cost", 0) == 0;
}

LabeledInstance with_costs(const LabeledInstance& data, double cost) {
  std::vector<Facility> fac(data.instance.facilities().begin(), data.instance.facilities().end());
  for (auto& f : fac) f.open_cost = cost;
  std::vector<Client> cl(data.instance.clients().begin(), data.instance.clients().end());
  return {MetricInstance(std::move(cl), std::move(fac), {.num_groups = data.instance.num_groups()}),
          data.group_labels};
}

double max_distance(const MetricInstance& inst) {
  double d = 0.0;
  for (int i = 0; i < inst.num_facilities(); ++i) {
    for (int j = 0; j < inst.num_clients(); ++j) d = std::max(d, inst.distance(i, j));
  }
  return d;
}

SweepRecord make_record(const LabeledInstance& data, const SweepConfig& cfg, Algorithm algo,
                        double pct, const OutlierBudgets& budgets, const IntegralSolution& sol) {
  const Objective obj = problem_of(algo) == Problem::kKMedian ? Objective::kKMedian
                                                              : Objective::kFacilityLocation;
  SweepRecord r = summarize(data, obj, pct, budgets, sol, cfg.seed);
  r.algorithm = algo;
  return r;
}

KMedianConfig kmedian_config(const SweepConfig& cfg) {
  KMedianConfig k;
  k.k = cfg.k;
  k.gamma = cfg.gamma;
  k.eps_guess = cfg.eps_guess;
  return k;
}

RoundingConfig rounding_config(const SweepConfig& cfg) {
  RoundingConfig r;
  r.epsilon = cfg.epsilon;
  return r;
}

// Cell body given an optional precomputed fair LP (FL sweeps only).
CellResult run_cell_impl(const LabeledInstance& data, const MetricInstance* pruned,
                         const SweepConfig& cfg, Algorithm algo, double pct,
                         const OutlierBudgets& budgets, const FractionalSolution* fair_lp,
                         double fair_lp_ms) {
  const MetricInstance& inst = data.instance;
  const auto start = std::chrono::steady_clock::now();
  IntegralSolution sol;
  double extra_ms = 0.0;
  switch (algo) {
    case Algorithm::kLprF: {
      if (fair_lp) {
        sol = round_lp_solution(inst, budgets, BudgetMode::kPerGroup, *fair_lp,
                                rounding_config(cfg))
                  .solution;
        extra_ms = fair_lp_ms;
      } else {
        const auto lp = solve_flfo_lp(*pruned, budgets, BudgetMode::kPerGroup, {});
        sol = round_lp_solution(inst, budgets, BudgetMode::kPerGroup, lp.solution,
                                rounding_config(cfg))
                  .solution;
      }
      break;
    }
    case Algorithm::kLprNf: {
      const auto lp = solve_flfo_lp(*pruned, budgets, BudgetMode::kAggregate, {});
      sol = round_lp_solution(inst, budgets, BudgetMode::kAggregate, lp.solution,
                              rounding_config(cfg))
                .solution;
      break;
    }
    case Algorithm::kGdfF:
      sol = gdf_f(inst, budgets);
      break;
    case Algorithm::kGdfNf:
      sol = gdf_nf(inst, budgets.total());
      break;
    case Algorithm::kRlsF:
      sol = r_ls_f(inst, budgets, kmedian_config(cfg));
      break;
    case Algorithm::kRlsNf:
      sol = r_ls_nf(inst, budgets.total(), kmedian_config(cfg));
      break;
    case Algorithm::kLsNf:
      sol = ls_nf(inst, budgets.total(), cfg.k);
      break;
  }
  CellResult out{make_record(data, cfg, algo, pct, budgets, sol), std::move(sol)};
  out.record.ms = elapsed_ms(start) + extra_ms;
  if (fair_lp) out.record.lp_objective = fair_lp->objective_value;
  return out;
}

}  // namespace

const char* to_string(Problem p) {
  return p == Problem::kKMedian ? "kmedian" : "fl";
}

const char* to_string(Algorithm a) {
  for (const auto& e : kAlgos) {
    if (e.algo == a) return e.name;
  }
  return "?";
}

Problem parse_problem(const std::string& s) {
  if (s == "fl") return Problem::kFacilityLocation;
  if (s == "kmedian") return Problem::kKMedian;
  throw ConfigError("unknown problem '" + s + "' (expected fl or kmedian)");
}

Algorithm parse_algorithm(const std::string& s) {
  for (const auto& e : kAlgos) {
    if (s == e.name) return e.algo;
  }
  throw ConfigError("unknown algorithm '" + s + "'");
}

Problem problem_of(Algorithm a) {
  for (const auto& e : kAlgos) {
    if (e.algo == a) return e.problem;
  }
  return Problem::kFacilityLocation;
}

std::vector<Algorithm> default_algorithms(Problem p) {
  std::vector<Algorithm> out;
  for (const auto& e : kAlgos) {
    if (e.problem == p) out.push_back(e.algo);
  }
  return out;
}

FacilityCostSpec parse_facility_cost(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "uniform_dmax") return {FacilityCostSpec::Kind::kUniformDmax, 0.0};
  if (s == "from_data") return {FacilityCostSpec::Kind::kFromData, 0.0};
  if (s.empty() || s == "default") return {};
  const double v = parse_number<double>("facility-cost", s);
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw ConfigError("facility-cost must be uniform_dmax, from_data or a number >= 0");
  }
  return {FacilityCostSpec::Kind::kFixed, v};
}

std::string to_string(const FacilityCostSpec& spec) {
  switch (spec.kind) {
    case FacilityCostSpec::Kind::kUniformDmax: return "uniform_dmax";
    case FacilityCostSpec::Kind::kFromData: return "from_data";
    case FacilityCostSpec::Kind::kFixed: return fmt(spec.value);
    case FacilityCostSpec::Kind::kDefault: break;
  }
  return "default";
}

void validate(const SweepConfig& cfg) {
  if (cfg.dataset.empty()) throw ConfigError("dataset is empty");
  for (double p : cfg.percentages) {
    if (!(p > 0.0 && p < 100.0)) throw ConfigError("percentages must lie in (0, 100)");
  }
  if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 0.5)) throw ConfigError("epsilon must lie in (0, 0.5]");
  if (!(cfg.gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (!(cfg.eps_guess > 0.0)) throw ConfigError("eps-guess must be positive");
  if (cfg.k < 1) throw ConfigError("k must be at least 1");
  if (cfg.m < 1) throw ConfigError("m must be at least 1");
  if (cfg.n < 0) throw ConfigError("n must be non-negative");
  if (cfg.jobs < 1) throw ConfigError("jobs must be at least 1");
  for (int b : cfg.group_budgets) {
    if (b < 0) throw ConfigError("group budgets must be non-negative");
  }
  for (Algorithm a : cfg.algorithms) {
    if (problem_of(a) != cfg.problem) {
      throw ConfigError(std::string("algorithm ") + to_string(a) + " does not solve problem " +
                        to_string(cfg.problem));
    }
  }
}

void apply_config_value(const std::string& key, const std::string& value, SweepConfig& cfg) {
  const std::string v = trim(value);
  if (key == "dataset") {
    cfg.dataset = v;
  } else if (key == "group-col") {
    cfg.group_column = v;
  } else if (key == "delimiter") {
    if (v.size() != 1) throw ConfigError("delimiter must be one character");
    cfg.delimiter = v[0];
  } else if (key == "n") {
    cfg.n = parse_number<int>(key, v);
  } else if (key == "m") {
    cfg.m = parse_number<int>(key, v);
    cfg.synthetic.num_facilities = cfg.m;
  } else if (key == "problem") {
    cfg.problem = parse_problem(v);
  } else if (key == "algo") {
    cfg.algorithms.clear();
    cfg.algorithms_set = true;
    for (const auto& a : split_list(v)) cfg.algorithms.push_back(parse_algorithm(a));
  } else if (key == "pct") {
    cfg.percentages.clear();
    for (const auto& p : split_list(v)) cfg.percentages.push_back(parse_number<double>(key, p));
  } else if (key == "group-budgets") {
    cfg.group_budgets.clear();
    for (const auto& b : split_list(v)) cfg.group_budgets.push_back(parse_number<int>(key, b));
  } else if (key == "epsilon") {
    cfg.epsilon = parse_number<double>(key, v);
  } else if (key == "gamma") {
    cfg.gamma = parse_number<double>(key, v);
  } else if (key == "eps-guess") {
    cfg.eps_guess = parse_number<double>(key, v);
  } else if (key == "k") {
    cfg.k = parse_number<int>(key, v);
  } else if (key == "facility-cost") {
    cfg.facility_cost = parse_facility_cost(v);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, v);
    cfg.synthetic.seed = cfg.seed;
  } else if (key == "out") {
    cfg.out = v;
  } else if (key == "jobs") {
    cfg.jobs = parse_number<int>(key, v);
  } else if (key == "n-in") {
    cfg.synthetic.n_in = parse_number<int>(key, v);
  } else if (key == "n-out") {
    cfg.synthetic.n_out = parse_number<int>(key, v);
  } else if (key == "in-sigma") {
    cfg.synthetic.in_sigma = parse_number<double>(key, v);
  } else if (key == "out-mean") {
    cfg.synthetic.out_mean = parse_number<double>(key, v);
  } else if (key == "out-sigma") {
    cfg.synthetic.out_sigma = parse_number<double>(key, v);
  } else if (key == "cost-near") {
    cfg.synthetic.cost_near = parse_number<double>(key, v);
  } else if (key == "cost-far") {
    cfg.synthetic.cost_far = parse_number<double>(key, v);
  } else if (key == "radius") {
    cfg.synthetic.near_radius = parse_number<double>(key, v);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void apply_config_text(std::istream& in, SweepConfig& cfg) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    try {
      apply_config_value(trim(line.substr(0, eq)), line.substr(eq + 1), cfg);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void apply_config_file(const std::string& path, SweepConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  apply_config_text(in, cfg);
}

std::vector<std::pair<std::string, std::string>> resolved_config(const SweepConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> kv = {
      {"dataset", cfg.dataset},
      {"group-col", cfg.group_column},
      {"delimiter", std::string(1, cfg.delimiter)},
      {"n", std::to_string(cfg.n)},
      {"m", std::to_string(cfg.m)},
      {"problem", to_string(cfg.problem)},
      {"algo", join(cfg.algorithms, [](Algorithm a) { return std::string(to_string(a)); })},
      {"pct", join(cfg.percentages, fmt)},
      {"group-budgets", join(cfg.group_budgets, [](int b) { return std::to_string(b); })},
      {"epsilon", fmt(cfg.epsilon)},
      {"gamma", fmt(cfg.gamma)},
      {"eps-guess", fmt(cfg.eps_guess)},
      {"k", std::to_string(cfg.k)},
      {"facility-cost", to_string(cfg.facility_cost)},
      {"seed", std::to_string(cfg.seed)},
      {"jobs", std::to_string(cfg.jobs)},
  };
  if (cfg.dataset == "synthetic") {
    const auto& s = cfg.synthetic;
    kv.insert(kv.end(), {{"n-in", std::to_string(s.n_in)},
                         {"n-out", std::to_string(s.n_out)},
                         {"in-sigma", fmt(s.in_sigma)},
                         {"out-mean", fmt(s.out_mean)},
                         {"out-sigma", fmt(s.out_sigma)},
                         {"cost-near", fmt(s.cost_near)},
                         {"cost-far", fmt(s.cost_far)},
                         {"radius", fmt(s.near_radius)}});
  }
  return kv;
}

SweepRecord summarize(const LabeledInstance& data, Objective objective, double pct,
                      const OutlierBudgets& budgets, const IntegralSolution& sol,
                      std::uint64_t seed) {
  const MetricInstance& inst = data.instance;
  SweepRecord r;
  r.pct = pct;
  r.cost = solution_cost(inst, sol, objective);
  r.unfairness = unfairness(budgets, sol);
  r.seed = seed;
  const auto counts = sol.outlier_counts();
  for (int g = 0; g < inst.num_groups(); ++g) {
    const std::string label =
        g < static_cast<int>(data.group_labels.size()) ? data.group_labels[g] : std::to_string(g);
    r.groups.push_back({label, budgets.per_group[g], counts[g]});
  }
  return r;
}

OutlierBudgets cell_budgets(const SweepConfig& cfg, const MetricInstance& inst, double pct) {
  OutlierBudgets b;
  if (cfg.group_budgets.empty()) {
    b = budgets_for_percentage(inst.group_sizes(), pct);
  } else {
    b.per_group = cfg.group_budgets;
  }
  validate_budgets(inst, b);
  return b;
}

OutlierBudgets budgets_for_percentage(const std::vector<int>& group_sizes, double pct) {
  OutlierBudgets b;
  for (int size : group_sizes) {
    b.per_group.push_back(static_cast<int>(std::lround(pct / 100.0 * size)));
  }
  return b;
}

LabeledInstance load_dataset(const SweepConfig& cfg) {
  using Kind = FacilityCostSpec::Kind;
  if (cfg.dataset != "synthetic" && !looks_like_instance_file(cfg.dataset)) {
    if (cfg.group_column.empty()) throw ConfigError("CSV datasets need --group-col");
    CsvOptions opt;
    opt.delimiter = cfg.delimiter;
    const RawTable table = load_csv(cfg.dataset, cfg.group_column, opt);
    TableInstanceConfig tc;
    tc.num_clients = cfg.n > 0 ? cfg.n : std::min(4500, table.num_rows());
    tc.num_facilities = cfg.m;
    tc.seed = cfg.seed;
    if (cfg.facility_cost.kind == Kind::kFixed) {
      tc.cost_policy = FacilityCostPolicy::kFixed;
      tc.fixed_cost = cfg.facility_cost.value;
    } else if (cfg.facility_cost.kind == Kind::kFromData) {
      throw ConfigError("facility-cost from_data needs a synthetic or instance dataset");
    }
    return instance_from_table(table, tc);
  }
  LabeledInstance data = [&] {
    if (cfg.dataset != "synthetic") return read_instance(cfg.dataset);
    SyntheticConfig s = cfg.synthetic;
    s.num_facilities = cfg.m;
    s.seed = cfg.seed;
    return generate_synthetic(s);
  }();
  switch (cfg.facility_cost.kind) {
    case Kind::kFixed: return with_costs(data, cfg.facility_cost.value);
    case Kind::kUniformDmax: return with_costs(data, max_distance(data.instance));
    default: return data;
  }
}

CellResult run_cell(const LabeledInstance& data, const SweepConfig& cfg, Algorithm algo,
                    double pct, const OutlierBudgets& budgets) {
  validate_budgets(data.instance, budgets);
  if (problem_of(algo) == Problem::kFacilityLocation) {
    const MetricInstance pruned = prune_pairs(data.instance);
    return run_cell_impl(data, &pruned, cfg, algo, pct, budgets, nullptr, 0.0);
  }
  return run_cell_impl(data, nullptr, cfg, algo, pct, budgets, nullptr, 0.0);
}

std::vector<SweepRecord> run_sweep(const LabeledInstance& data, const SweepConfig& cfg) {
  validate(cfg);
  const MetricInstance& inst = data.instance;
  const int np = static_cast<int>(cfg.percentages.size());
  const int na = static_cast<int>(cfg.algorithms.size());
  if (na == 0) return {};

  std::vector<OutlierBudgets> budgets;
  for (double p : cfg.percentages) budgets.push_back(cell_budgets(cfg, inst, p));

  const bool fl = cfg.problem == Problem::kFacilityLocation;
  std::optional<MetricInstance> pruned;
  std::vector<FractionalSolution> lps;
  std::vector<double> lp_ms(np, 0.0);
  if (fl) {
    pruned.emplace(prune_pairs(inst));
    lps.resize(np);
    parallel_for(np, cfg.jobs, [&](int p) {
      const auto start = std::chrono::steady_clock::now();
      lps[p] = solve_flfo_lp(*pruned, budgets[p], BudgetMode::kPerGroup, {}).solution;
      lp_ms[p] = elapsed_ms(start);
    });
  }

  std::vector<SweepRecord> records(static_cast<std::size_t>(na) * np);
  parallel_for(na * np, cfg.jobs, [&](int cell) {
    const int a = cell / np;
    const int p = cell % np;
    records[cell] = run_cell_impl(data, fl ? &*pruned : nullptr, cfg, cfg.algorithms[a],
                                  cfg.percentages[p], budgets[p], fl ? &lps[p] : nullptr,
                                  fl ? lp_ms[p] : 0.0)
                        .record;
  });
  return records;
}

void write_config_header(std::ostream& out, const SweepConfig& cfg) {
  for (const auto& [k, v] : resolved_config(cfg)) out << "# " << k << " = " << v << '\n';
}

void write_records(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    const std::string lp = r.has_lp() ? fmt(r.lp_objective) : "";
    const std::string head = (r.name.empty() ? std::string(to_string(r.algorithm)) : r.name) + ',' + fmt(r.pct) + ',' +
                             fmt(r.cost) + ',' + lp + ',';
    const std::string tail = ',' + fmt(r.ms) + ',' + std::to_string(r.seed) + '\n';
    int ell = 0;
    int ell_prime = 0;
    for (const auto& g : r.groups) {
      const int used[] = {g.ell_prime};
      out << head << fmt(unfairness(OutlierBudgets{{g.ell}}, used)) << ',' << g.label << ',' << g.ell << ','
          << g.ell_prime << tail;
      ell += g.ell;
      ell_prime += g.ell_prime;
    }
    out << head << fmt(r.unfairness) << ",all," << ell << ',' << ell_prime << tail;
  }
}

}  // namespace fairloc
