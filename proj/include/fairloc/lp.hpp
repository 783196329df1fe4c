#pragma once

#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fairloc/error.hpp"
#include "fairloc/metric.hpp"

namespace fairloc {

enum class RowSense { kGreaterEqual, kLessEqual };

enum class VarKind { kAssign, kOpen, kOutlier, kOther };
struct VarRole {
  VarKind kind = VarKind::kOther;
  int facility = -1;
  int client = -1;
};

enum class RowKind { kCoverage, kCapacity, kBudget, kOther };
struct RowRole {
  RowKind kind = RowKind::kOther;
  int facility = -1;
  int client = -1;
  int group = -1;
};

struct LpEntry {
  int row;
  double value;
};

struct LpTerm {
  int var;
  double coef;
};

// Column-oriented linear program: minimize c^T x subject to row constraints
// and box bounds on every variable.
class LpModel {
 public:
  int add_variable(double cost, double lower, double upper, VarRole role = {});
  int add_row(RowSense sense, double rhs, std::span<const LpTerm> terms,
              RowRole role = {});
  int add_row(RowSense sense, double rhs, std::initializer_list<LpTerm> terms,
              RowRole role = {});

  // Appends a coefficient to an existing row.
  void add_coefficient(int var, int row, double value);

  // Hint for the cold start: begin with this variable at its upper bound.
  void set_start_at_upper(int var, bool value = true);

  int num_variables() const { return static_cast<int>(cost_.size()); }
  int num_rows() const { return static_cast<int>(sense_.size()); }
  std::size_t num_nonzeros() const;

  double cost(int v) const { return cost_[v]; }
  double lower(int v) const { return lower_[v]; }
  double upper(int v) const { return upper_[v]; }
  bool start_at_upper(int v) const { return start_upper_[v] != 0; }
  const VarRole& var_role(int v) const { return var_role_[v]; }
  std::span<const LpEntry> column(int v) const { return columns_[v]; }

  RowSense sense(int r) const { return sense_[r]; }
  double rhs(int r) const { return rhs_[r]; }
  const RowRole& row_role(int r) const { return row_role_[r]; }

 private:
  std::vector<double> cost_, lower_, upper_;
  std::vector<char> start_upper_;
  std::vector<VarRole> var_role_;
  std::vector<std::vector<LpEntry>> columns_;
  std::vector<RowSense> sense_;
  std::vector<double> rhs_;
  std::vector<RowRole> row_role_;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit, kNumericalFailure };
const char* to_string(LpStatus status);

class LpError : public SolverError {
 public:
  LpError(LpStatus status, const std::string& what) : SolverError(what), status_(status) {}
  LpStatus status() const { return status_; }

 private:
  LpStatus status_;
};

enum class VarStatus : unsigned char { kBasic, kAtLower, kAtUpper };

// Simplex basis over structural variables followed by one logical per row.
struct Basis {
  std::vector<VarStatus> status;
  bool empty() const { return status.empty(); }
};

struct SimplexOptions {
  double primal_tolerance = 1e-7;
  double dual_tolerance = 1e-9;
  int refactor_interval = 100;
  // Pivot cap; <= 0 means 50 * (rows + columns).
  long max_pivots = 0;
  // Consecutive degenerate pivots before switching to Bland's rule.
  int degeneracy_streak = 200;
  const Basis* warm_start = nullptr;
};

struct SimplexResult {
  LpStatus status = LpStatus::kNumericalFailure;
  double objective = 0.0;
  std::vector<double> values;     // structural variables
  std::vector<double> row_duals;  // one per row, sign convention of c - A^T y
  Basis basis;                    // empty when artificials remained basic
  long pivots = 0;
  long bound_flips = 0;
  long degenerate_pivots = 0;
  bool warm_started = false;
};

// Two-phase bounded-variable primal simplex. Never throws on solver status;
// inspect `status`.
SimplexResult solve_simplex(const LpModel& model, const SimplexOptions& options = {});

// Largest violation of any row or bound, computed directly from the rows.
double max_constraint_violation(const LpModel& model, std::span<const double> values);

// --- Fair-outlier facility location LP --------------------------------------

enum class BudgetMode { kPerGroup, kAggregate };

struct FractionalAssignment {
  int facility;
  double value;
};

struct FractionalSolution {
  // Positive assignment values per client, ascending by facility.
  std::vector<std::vector<FractionalAssignment>> x;
  std::vector<double> y;  // per facility
  std::vector<double> z;  // per client
  double objective_value = 0.0;

  double assignment_sum(int j) const;
  double value(int i, int j) const;
};

// Variables: x over allowed pairs (client-major), then y, then z.
// Rows: coverage per client, capacity per allowed pair, then one budget row
// per group (kPerGroup) or a single total-budget row (kAggregate).
LpModel build_flfo_lp(const MetricInstance& inst, const OutlierBudgets& budgets,
                      BudgetMode mode);

// Reads a FractionalSolution back out of a model built by build_flfo_lp (or
// any model whose variables carry kAssign/kOpen/kOutlier roles).
FractionalSolution extract_fractional(const LpModel& model, std::span<const double> values,
                                      int num_clients, int num_facilities);

// Solves and returns the fractional solution; throws LpError on failure.
FractionalSolution solve_lp(const LpModel& model, const SimplexOptions& options = {});

// sum_i f_i y_i + sum_ij d_ij x_ij.
double fractional_cost(const MetricInstance& inst, const FractionalSolution& sol);

// Largest violation of coverage, capacity, budget rows and [0,1] bounds,
// evaluated from the instance (independently of any LpModel).
double flfo_violation(const MetricInstance& inst, const OutlierBudgets& budgets,
                      BudgetMode mode, const FractionalSolution& sol);

struct FlfoLpOptions {
  SimplexOptions simplex;
  // Pairs per client in the first restricted LP; 0 disables pair pricing and
  // solves the full model in one shot.
  int initial_pairs_per_client = 3;
  // Cap on pairs priced in per client and round (nearest first).
  int max_new_pairs_per_client = 2;
  int max_rounds = 500;
  // Start from an integral solution built around `start_open`, or around the
  // greedy dual-fitting open set when `start_open` is empty. Without it the
  // first solve starts from all clients marked outliers.
  bool heuristic_start = true;
  std::vector<int> start_open;
};

struct FlfoLpResult {
  FractionalSolution solution;
  int rounds = 0;
  std::size_t pairs_used = 0;
  long pivots = 0;
};

// Solves the LP over the instance's allowed pairs. Assignment columns are
// priced in lazily: a pair enters the restricted model only while its reduced
// cost d_ij - u_j is negative, u_j being the coverage dual. The returned
// solution is optimal for the full model.
FlfoLpResult solve_flfo_lp(const MetricInstance& inst, const OutlierBudgets& budgets,
                           BudgetMode mode, const FlfoLpOptions& options = {});

struct GapInstance {
  MetricInstance instance;
  OutlierBudgets budgets;
};

// One facility of cost f and M clients all at the origin, one group, M-1
// outliers allowed. LP optimum f/M, integral optimum f.
GapInstance build_gap_instance(double f, int M);

// Fixed-format MPS dump.
void write_mps(const LpModel& model, std::ostream& out, const std::string& name = "FLFO");

}  // namespace fairloc
