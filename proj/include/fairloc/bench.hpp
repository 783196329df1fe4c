#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fairloc/datasets.hpp"
#include "fairloc/error.hpp"
#include "fairloc/metric.hpp"

namespace fairloc {

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

enum class Problem { kFacilityLocation, kKMedian };
enum class Algorithm { kLprF, kLprNf, kGdfF, kGdfNf, kRlsF, kRlsNf, kLsNf };

const char* to_string(Problem p);
const char* to_string(Algorithm a);
Problem parse_problem(const std::string& s);
Algorithm parse_algorithm(const std::string& s);
Problem problem_of(Algorithm a);
std::vector<Algorithm> default_algorithms(Problem p);

// "uniform_dmax", "from_data", or a non-negative number used as a fixed cost.
struct FacilityCostSpec {
  enum class Kind { kDefault, kUniformDmax, kFromData, kFixed };
  Kind kind = Kind::kDefault;
  double value = 0.0;
};
FacilityCostSpec parse_facility_cost(const std::string& s);
std::string to_string(const FacilityCostSpec& spec);

struct SweepConfig {
  // "synthetic", a CSV path, or an instance file written by `generate`.
  std::string dataset = "synthetic";
  std::string group_column;
  char delimiter = ',';
  int n = 0;  // clients sampled from a CSV; 0 takes min(4500, rows)
  int m = 100;
  Problem problem = Problem::kFacilityLocation;
  std::vector<Algorithm> algorithms;
  bool algorithms_set = false;  // an explicit empty list yields a header-only CSV
  std::vector<double> percentages = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  // When non-empty, used for every cell instead of the percentage rule.
  std::vector<int> group_budgets;
  double epsilon = 0.1;
  double gamma = 0.5;
  double eps_guess = 0.5;
  int k = 5;
  FacilityCostSpec facility_cost;
  std::uint64_t seed = 1;
  std::string out;
  int jobs = 1;
  SyntheticConfig synthetic;
};

void validate(const SweepConfig& cfg);

// Flat `key = value` lines; `#` starts a comment. List keys (algo, pct,
// group-budgets) take comma-separated values. Unknown keys are errors.
void apply_config_text(std::istream& in, SweepConfig& cfg);
void apply_config_file(const std::string& path, SweepConfig& cfg);
void apply_config_value(const std::string& key, const std::string& value, SweepConfig& cfg);
std::vector<std::pair<std::string, std::string>> resolved_config(const SweepConfig& cfg);

// l_g = round(pct / 100 * |C_g|).
OutlierBudgets budgets_for_percentage(const std::vector<int>& group_sizes, double pct);

LabeledInstance load_dataset(const SweepConfig& cfg);

struct GroupOutliers {
  std::string label;
  int ell = 0;
  int ell_prime = 0;
};

struct SweepRecord {
  Algorithm algorithm = Algorithm::kGdfF;
  double pct = 0.0;
  double cost = 0.0;
  double lp_objective = -1.0;  // negative when not computed
  double unfairness = 1.0;
  std::vector<GroupOutliers> groups;
  double ms = 0.0;
  std::uint64_t seed = 0;
  std::string name;  // overrides the algorithm column when set

  bool has_lp() const { return lp_objective >= 0.0; }
};

// Cost, unfairness and per-group counts of one solution.
SweepRecord summarize(const LabeledInstance& data, Objective objective, double pct,
                      const OutlierBudgets& budgets, const IntegralSolution& sol,
                      std::uint64_t seed);

// Budgets of one sweep cell: group_budgets when set, else the percentage rule.
OutlierBudgets cell_budgets(const SweepConfig& cfg, const MetricInstance& inst, double pct);

struct CellResult {
  SweepRecord record;
  IntegralSolution solution;
};

// One algorithm on one budget vector.
CellResult run_cell(const LabeledInstance& data, const SweepConfig& cfg, Algorithm algo,
                    double pct, const OutlierBudgets& budgets);

// All (algorithm, percentage) cells, algorithm-major in config order. FL
// sweeps solve the fair LP once per percentage; lpr-f rounds that solution
// and every row carries its objective.
std::vector<SweepRecord> run_sweep(const LabeledInstance& data, const SweepConfig& cfg);

inline constexpr const char* kCsvHeader = "algo,pct,cost,lp_obj,unfairness,group,ell,ell_prime,ms,seed";

void write_config_header(std::ostream& out, const SweepConfig& cfg);
// Per-group rows followed by one summary row (group "all") per record.
void write_records(std::ostream& out, const std::vector<SweepRecord>& records);

}  // namespace fairloc
