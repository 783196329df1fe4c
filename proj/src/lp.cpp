#include "fairloc/lp.hpp"

#include "fairloc/greedy_dual.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

namespace fairloc {

int LpModel::add_variable(double cost, double lower, double upper, VarRole role) {
  if (lower > upper) throw InputError("variable lower bound exceeds upper bound");
  cost_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  start_upper_.push_back(0);
  var_role_.push_back(role);
  columns_.emplace_back();
  return num_variables() - 1;
}

int LpModel::add_row(RowSense sense, double rhs, std::span<const LpTerm> terms,
                     RowRole role) {
  const int row = num_rows();
  for (const LpTerm& t : terms) {
    if (t.var < 0 || t.var >= num_variables()) throw InputError("row references unknown variable");
  }
  sense_.push_back(sense);
  rhs_.push_back(rhs);
  row_role_.push_back(role);
  for (const LpTerm& t : terms) columns_[t.var].push_back({row, t.coef});
  return row;
}

int LpModel::add_row(RowSense sense, double rhs, std::initializer_list<LpTerm> terms,
                     RowRole role) {
  return add_row(sense, rhs, std::span<const LpTerm>(terms.begin(), terms.size()), role);
}

void LpModel::add_coefficient(int var, int row, double value) {
  if (var < 0 || var >= num_variables() || row < 0 || row >= num_rows()) {
    throw InputError("coefficient outside the model");
  }
  columns_[var].push_back({row, value});
}

void LpModel::set_start_at_upper(int var, bool value) { start_upper_[var] = value ? 1 : 0; }

std::size_t LpModel::num_nonzeros() const {
  std::size_t nnz = 0;
  for (const auto& c : columns_) nnz += c.size();
  return nnz;
}

double FractionalSolution::assignment_sum(int j) const {
  double sum = 0.0;
  for (const auto& a : x[j]) sum += a.value;
  return sum;
}

double FractionalSolution::value(int i, int j) const {
  for (const auto& a : x[j]) {
    if (a.facility == i) return a.value;
  }
  return 0.0;
}

namespace {

// Incrementally grown fair-outlier LP. Variables and rows are appended as
// assignment pairs are priced in, so the basis of one solve warm-starts the
// next.
class FlfoModelBuilder {
 public:
  FlfoModelBuilder(const MetricInstance& inst, const OutlierBudgets& budgets,
                   BudgetMode mode)
      : inst_(inst) {
    const int n = inst.num_clients();
    const int m = inst.num_facilities();
    open_var_.resize(m);
    outlier_var_.resize(n);
    coverage_row_.resize(n);
    for (int i = 0; i < m; ++i) {
      open_var_[i] = model_.add_variable(inst.facility(i).open_cost, 0.0, 1.0,
                                         {VarKind::kOpen, i, -1});
    }
    for (int j = 0; j < n; ++j) {
      outlier_var_[j] = model_.add_variable(0.0, 0.0, 1.0, {VarKind::kOutlier, -1, j});
      model_.set_start_at_upper(outlier_var_[j]);
    }
    for (int j = 0; j < n; ++j) {
      coverage_row_[j] = model_.add_row(RowSense::kGreaterEqual, 1.0,
                                        {{outlier_var_[j], 1.0}},
                                        {RowKind::kCoverage, -1, j, -1});
    }
    if (mode == BudgetMode::kPerGroup) {
      std::vector<std::vector<LpTerm>> terms(inst.num_groups());
      for (int j = 0; j < n; ++j) terms[inst.client(j).group].push_back({outlier_var_[j], 1.0});
      for (int g = 0; g < inst.num_groups(); ++g) {
        model_.add_row(RowSense::kLessEqual, budgets.per_group[g], terms[g],
                       {RowKind::kBudget, -1, -1, g});
      }
    } else {
      std::vector<LpTerm> terms;
      for (int j = 0; j < n; ++j) terms.push_back({outlier_var_[j], 1.0});
      model_.add_row(RowSense::kLessEqual, budgets.total(), terms,
                     {RowKind::kBudget, -1, -1, -1});
    }
  }

  // Adds x_ij, its coverage coefficient and the row x_ij - y_i <= 0.
  int add_pair(int i, int j) {
    const int x = model_.add_variable(inst_.distance(i, j), 0.0, 1.0, {VarKind::kAssign, i, j});
    model_.add_coefficient(x, coverage_row_[j], 1.0);
    model_.add_row(RowSense::kLessEqual, 0.0, {{x, 1.0}, {open_var_[i], -1.0}},
                   {RowKind::kCapacity, i, j, -1});
    return x;
  }

  const LpModel& model() const { return model_; }
  int coverage_row(int j) const { return coverage_row_[j]; }
  int open_var(int i) const { return open_var_[i]; }
  int outlier_var(int j) const { return outlier_var_[j]; }

 private:
  const MetricInstance& inst_;
  LpModel model_;
  std::vector<int> open_var_;
  std::vector<int> outlier_var_;
  std::vector<int> coverage_row_;
};

void check_lp_inputs(const MetricInstance& inst, const OutlierBudgets& budgets) {
  if (budgets.num_groups() != inst.num_groups()) {
    throw InputError("budget vector length " + std::to_string(budgets.num_groups()) +
                     " does not match group count " + std::to_string(inst.num_groups()));
  }
  for (int b : budgets.per_group) {
    if (b < 0) throw InputError("negative outlier budget");
  }
}

// Extends a basis after `new_vars` structurals and `new_rows` rows were
// appended; new columns start nonbasic at zero, new logicals basic.
Basis extend_basis(const Basis& old, int old_vars, int new_vars, int new_rows) {
  Basis out;
  out.status.reserve(old.status.size() + new_vars + new_rows);
  out.status.insert(out.status.end(), old.status.begin(), old.status.begin() + old_vars);
  out.status.insert(out.status.end(), new_vars, VarStatus::kAtLower);
  out.status.insert(out.status.end(), old.status.begin() + old_vars, old.status.end());
  out.status.insert(out.status.end(), new_rows, VarStatus::kBasic);
  return out;
}

// Integral starting point over the allowed pairs: serve every client from
// its nearest allowed facility in `start_open` (opening its nearest allowed
// facility when there is none), then turn the farthest clients into outliers
// as far as the budgets allow and close facilities left without clients.
void crash_start(const MetricInstance& inst, const OutlierBudgets& budgets, BudgetMode mode,
                 const std::vector<std::vector<int>>& by_distance,
                 const std::vector<int>& start_open, std::vector<int>& serve,
                 std::vector<char>& open) {
  const int n = inst.num_clients();
  open.assign(inst.num_facilities(), 0);
  for (int i : start_open) open[i] = 1;
  serve.assign(n, -1);
  for (int j = 0; j < n; ++j) {
    const auto& list = by_distance[j];
    if (std::none_of(list.begin(), list.end(), [&](int i) { return open[i] != 0; })) {
      open[list.front()] = 1;
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i : by_distance[j]) {
      if (open[i]) {
        serve[j] = i;
        break;
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return inst.distance(serve[a], a) > inst.distance(serve[b], b);
  });
  std::vector<int> left = budgets.per_group;
  int total_left = budgets.total();
  for (int j : order) {
    if (mode == BudgetMode::kPerGroup) {
      int& l = left[inst.client(j).group];
      if (l == 0) continue;
      --l;
    } else {
      if (total_left == 0) break;
      --total_left;
    }
    serve[j] = -1;
  }

  std::fill(open.begin(), open.end(), 0);
  for (int j = 0; j < n; ++j) {
    if (serve[j] >= 0) open[serve[j]] = 1;
  }
}

std::string mps_number(double v) {
  char buf[64];
  for (int precision = 12; precision > 0; --precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::string(buf).size() <= 12) break;
  }
  return buf;
}

std::string padded(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string indexed_name(char prefix, int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%07d", prefix, index);
  return buf;
}

}  // namespace

LpModel build_flfo_lp(const MetricInstance& inst, const OutlierBudgets& budgets,
                      BudgetMode mode) {
  check_lp_inputs(inst, budgets);
  const int n = inst.num_clients();
  const int m = inst.num_facilities();
  LpModel model;
  std::vector<int> open_var(m), outlier_var(n);
  std::vector<std::vector<int>> pair_var(n);
  for (int j = 0; j < n; ++j) {
    for (int i : inst.allowed_facilities(j)) {
      pair_var[j].push_back(
          model.add_variable(inst.distance(i, j), 0.0, 1.0, {VarKind::kAssign, i, j}));
    }
  }
  for (int i = 0; i < m; ++i) {
    open_var[i] = model.add_variable(inst.facility(i).open_cost, 0.0, 1.0,
                                     {VarKind::kOpen, i, -1});
  }
  for (int j = 0; j < n; ++j) {
    outlier_var[j] = model.add_variable(0.0, 0.0, 1.0, {VarKind::kOutlier, -1, j});
    model.set_start_at_upper(outlier_var[j]);
  }

  std::vector<LpTerm> terms;
  for (int j = 0; j < n; ++j) {
    terms.clear();
    for (int x : pair_var[j]) terms.push_back({x, 1.0});
    terms.push_back({outlier_var[j], 1.0});
    model.add_row(RowSense::kGreaterEqual, 1.0, terms, {RowKind::kCoverage, -1, j, -1});
  }
  for (int j = 0; j < n; ++j) {
    const auto allowed = inst.allowed_facilities(j);
    for (std::size_t k = 0; k < allowed.size(); ++k) {
      const int i = allowed[k];
      model.add_row(RowSense::kLessEqual, 0.0, {{pair_var[j][k], 1.0}, {open_var[i], -1.0}},
                    {RowKind::kCapacity, i, j, -1});
    }
  }
  if (mode == BudgetMode::kPerGroup) {
    std::vector<std::vector<LpTerm>> group_terms(inst.num_groups());
    for (int j = 0; j < n; ++j) {
      group_terms[inst.client(j).group].push_back({outlier_var[j], 1.0});
    }
    for (int g = 0; g < inst.num_groups(); ++g) {
      model.add_row(RowSense::kLessEqual, budgets.per_group[g], group_terms[g],
                    {RowKind::kBudget, -1, -1, g});
    }
  } else {
    terms.clear();
    for (int j = 0; j < n; ++j) terms.push_back({outlier_var[j], 1.0});
    model.add_row(RowSense::kLessEqual, budgets.total(), terms, {RowKind::kBudget, -1, -1, -1});
  }
  return model;
}

FractionalSolution extract_fractional(const LpModel& model, std::span<const double> values,
                                      int num_clients, int num_facilities) {
  FractionalSolution sol;
  sol.x.assign(num_clients, {});
  sol.y.assign(num_facilities, 0.0);
  sol.z.assign(num_clients, 0.0);
  for (int v = 0; v < model.num_variables(); ++v) {
    const VarRole& role = model.var_role(v);
    const double value = values[v];
    sol.objective_value += model.cost(v) * value;
    switch (role.kind) {
      case VarKind::kAssign:
        if (value > 0.0) sol.x[role.client].push_back({role.facility, value});
        break;
      case VarKind::kOpen: sol.y[role.facility] = value; break;
      case VarKind::kOutlier: sol.z[role.client] = value; break;
      case VarKind::kOther: break;
    }
  }
  for (auto& list : sol.x) {
    std::sort(list.begin(), list.end(),
              [](const FractionalAssignment& a, const FractionalAssignment& b) {
                return a.facility < b.facility;
              });
  }
  return sol;
}

FractionalSolution solve_lp(const LpModel& model, const SimplexOptions& options) {
  const SimplexResult result = solve_simplex(model, options);
  if (result.status != LpStatus::kOptimal) {
    throw LpError(result.status, std::string("LP solve failed: ") + to_string(result.status));
  }
  int n = 0;
  int m = 0;
  for (int v = 0; v < model.num_variables(); ++v) {
    const VarRole& role = model.var_role(v);
    n = std::max(n, role.client + 1);
    m = std::max(m, role.facility + 1);
  }
  FractionalSolution sol = extract_fractional(model, result.values, n, m);
  sol.objective_value = result.objective;
  return sol;
}

double fractional_cost(const MetricInstance& inst, const FractionalSolution& sol) {
  double cost = 0.0;
  for (int i = 0; i < inst.num_facilities(); ++i) cost += inst.facility(i).open_cost * sol.y[i];
  for (int j = 0; j < inst.num_clients(); ++j) {
    for (const auto& a : sol.x[j]) cost += inst.distance(a.facility, j) * a.value;
  }
  return cost;
}

double flfo_violation(const MetricInstance& inst, const OutlierBudgets& budgets,
                      BudgetMode mode, const FractionalSolution& sol) {
  double worst = 0.0;
  auto bound = [&worst](double v) {
    worst = std::max(worst, -v);
    worst = std::max(worst, v - 1.0);
  };
  std::vector<char> allowed(inst.num_facilities());
  std::vector<double> group_outliers(inst.num_groups(), 0.0);
  for (int j = 0; j < inst.num_clients(); ++j) {
    std::fill(allowed.begin(), allowed.end(), 0);
    for (int i : inst.allowed_facilities(j)) allowed[i] = 1;
    double served = 0.0;
    for (const auto& a : sol.x[j]) {
      bound(a.value);
      served += a.value;
      if (!allowed[a.facility]) worst = std::max(worst, std::abs(a.value));
      worst = std::max(worst, a.value - sol.y[a.facility]);
    }
    bound(sol.z[j]);
    worst = std::max(worst, 1.0 - served - sol.z[j]);
    group_outliers[inst.client(j).group] += sol.z[j];
  }
  for (double y : sol.y) bound(y);
  if (mode == BudgetMode::kPerGroup) {
    for (int g = 0; g < inst.num_groups(); ++g) {
      worst = std::max(worst, group_outliers[g] - budgets.per_group[g]);
    }
  } else {
    const double total = std::accumulate(group_outliers.begin(), group_outliers.end(), 0.0);
    worst = std::max(worst, total - budgets.total());
  }
  return worst;
}

FlfoLpResult solve_flfo_lp(const MetricInstance& inst, const OutlierBudgets& budgets,
                           BudgetMode mode, const FlfoLpOptions& options) {
  check_lp_inputs(inst, budgets);
  const int n = inst.num_clients();
  const int m = inst.num_facilities();

  // Each client's allowed facilities, nearest first.
  std::vector<std::vector<int>> by_distance(n);
  for (int j = 0; j < n; ++j) {
    const auto allowed = inst.allowed_facilities(j);
    by_distance[j].assign(allowed.begin(), allowed.end());
    std::stable_sort(by_distance[j].begin(), by_distance[j].end(),
                     [&](int a, int b) { return inst.distance(a, j) < inst.distance(b, j); });
  }

  FlfoModelBuilder builder(inst, budgets, mode);
  std::vector<char> included(static_cast<std::size_t>(n) * m, 0);
  std::size_t pairs = 0;
  auto include = [&](int i, int j) {
    const int x = builder.add_pair(i, j);
    included[static_cast<std::size_t>(j) * m + i] = 1;
    ++pairs;
    return x;
  };

  std::vector<int> serve;
  std::vector<char> open;
  const bool crash = options.heuristic_start || !options.start_open.empty();
  if (crash) {
    std::vector<int> start_open = options.start_open;
    if (start_open.empty()) {
      start_open = mode == BudgetMode::kPerGroup ? gdf_f(inst, budgets).open
                                                 : gdf_nf(inst, budgets.total()).open;
    }
    crash_start(inst, budgets, mode, by_distance, start_open, serve, open);
  }

  const std::size_t initial = options.initial_pairs_per_client > 0
                                  ? static_cast<std::size_t>(options.initial_pairs_per_client)
                                  : std::numeric_limits<std::size_t>::max();
  std::vector<int> serve_var(n, -1);
  for (int j = 0; j < n; ++j) {
    const std::size_t take = std::min(initial, by_distance[j].size());
    for (std::size_t k = 0; k < take; ++k) {
      const int x = include(by_distance[j][k], j);
      if (crash && by_distance[j][k] == serve[j]) serve_var[j] = x;
    }
    if (crash && serve[j] >= 0 && serve_var[j] < 0) serve_var[j] = include(serve[j], j);
  }

  FlfoLpResult out;
  Basis basis;
  if (crash) {
    // All logicals basic; every structural sits at a bound describing an
    // integral solution, which is primal feasible.
    const LpModel& model = builder.model();
    basis.status.assign(model.num_variables() + model.num_rows(), VarStatus::kAtLower);
    for (int r = 0; r < model.num_rows(); ++r) {
      basis.status[model.num_variables() + r] = VarStatus::kBasic;
    }
    for (int i = 0; i < m; ++i) {
      if (open[i]) basis.status[builder.open_var(i)] = VarStatus::kAtUpper;
    }
    for (int j = 0; j < n; ++j) {
      basis.status[serve[j] < 0 ? builder.outlier_var(j) : serve_var[j]] = VarStatus::kAtUpper;
    }
  }
  SimplexOptions simplex = options.simplex;
  for (int round = 1;; ++round) {
    simplex.warm_start = basis.empty() ? nullptr : &basis;
    const SimplexResult result = solve_simplex(builder.model(), simplex);
    out.pivots += result.pivots;
    if (result.status != LpStatus::kOptimal) {
      throw LpError(result.status, std::string("LP solve failed: ") + to_string(result.status));
    }
    out.rounds = round;

    std::vector<std::pair<int, int>> entering;
    for (int j = 0; j < n; ++j) {
      const double dual = result.row_duals[builder.coverage_row(j)];
      int taken = 0;
      for (int i : by_distance[j]) {
        if (taken >= options.max_new_pairs_per_client) break;
        const double d = inst.distance(i, j);
        if (d >= dual - simplex.dual_tolerance) break;
        if (!included[static_cast<std::size_t>(j) * m + i]) {
          entering.emplace_back(i, j);
          ++taken;
        }
      }
    }
    if (entering.empty()) {
      out.solution = extract_fractional(builder.model(), result.values, n, m);
      out.solution.objective_value = result.objective;
      out.pairs_used = pairs;
      return out;
    }
    if (round >= options.max_rounds) {
      throw LpError(LpStatus::kIterationLimit, "pair pricing did not converge");
    }
    const int old_vars = builder.model().num_variables();
    for (const auto& [i, j] : entering) {
      builder.add_pair(i, j);
      included[static_cast<std::size_t>(j) * m + i] = 1;
      ++pairs;
    }
    const int added = static_cast<int>(entering.size());
    basis = result.basis.empty() ? Basis{} : extend_basis(result.basis, old_vars, added, added);
  }
}

GapInstance build_gap_instance(double f, int M) {
  if (M < 2) throw InputError("gap instance needs M >= 2");
  if (!(f > 0.0)) throw InputError("gap instance needs f > 0");
  std::vector<Client> clients(M, Client{{0.0}, 0});
  std::vector<Facility> facilities{Facility{{0.0}, f}};
  return GapInstance{MetricInstance(std::move(clients), std::move(facilities)),
                     OutlierBudgets{{M - 1}}};
}

void write_mps(const LpModel& model, std::ostream& out, const std::string& name) {
  out << "NAME          " << name << "\n";
  out << "ROWS\n";
  out << " N  COST\n";
  for (int r = 0; r < model.num_rows(); ++r) {
    out << ' ' << (model.sense(r) == RowSense::kGreaterEqual ? 'G' : 'L') << "  "
        << indexed_name('R', r) << "\n";
  }
  out << "COLUMNS\n";
  auto entry = [&out](const std::string& col, const std::string& row, double v) {
    out << "    " << padded(col, 8) << "  " << padded(row, 8) << "  " << mps_number(v) << "\n";
  };
  for (int v = 0; v < model.num_variables(); ++v) {
    const std::string col = indexed_name('C', v);
    if (model.cost(v) != 0.0 || model.column(v).empty()) entry(col, "COST", model.cost(v));
    auto column = std::vector<LpEntry>(model.column(v).begin(), model.column(v).end());
    std::sort(column.begin(), column.end(),
              [](const LpEntry& a, const LpEntry& b) { return a.row < b.row; });
    for (const LpEntry& e : column) entry(col, indexed_name('R', e.row), e.value);
  }
  out << "RHS\n";
  for (int r = 0; r < model.num_rows(); ++r) {
    if (model.rhs(r) != 0.0) entry("RHS", indexed_name('R', r), model.rhs(r));
  }
  out << "BOUNDS\n";
  for (int v = 0; v < model.num_variables(); ++v) {
    const std::string col = indexed_name('C', v);
    const double lo = model.lower(v);
    const double hi = model.upper(v);
    auto bound = [&](const char* kind, double value) {
      out << ' ' << kind << " BND       " << padded(col, 8) << "  " << mps_number(value) << "\n";
    };
    if (lo == hi) {
      bound("FX", lo);
      continue;
    }
    if (std::isinf(lo)) {
      out << " MI BND       " << col << "\n";
    } else if (lo != 0.0) {
      bound("LO", lo);
    }
    if (std::isfinite(hi)) bound("UP", hi);
  }
  out << "ENDATA\n";
}

}  // namespace fairloc
