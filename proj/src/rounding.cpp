#include "fairloc/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairloc/error.hpp"

namespace fairloc {

namespace {

constexpr double kThresholdSlack = 1e-9;

// Lowest-index argmax of y over `candidates`; -1 when empty.
int best_open_value(const std::vector<double>& y, std::span<const int> candidates) {
  int best = -1;
  for (int i : candidates) {
    if (best < 0 || y[i] > y[best] || (y[i] == y[best] && i < best)) best = i;
  }
  return best;
}

}  // namespace

void validate_rounding_config(const RoundingConfig& cfg) {
  if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 0.5)) {
    throw InputError("epsilon must lie in (0, 0.5], got " + std::to_string(cfg.epsilon));
  }
  if (!(cfg.open_threshold > 0.0 && cfg.open_threshold <= 1.0)) {
    throw InputError("open threshold must lie in (0, 1]");
  }
}

std::vector<int> PartitionedClients::outlier_counts() const {
  std::vector<int> counts;
  for (const auto& g : outliers) counts.push_back(static_cast<int>(g.size()));
  return counts;
}

int violated_budget(int budget, double eps) {
  return static_cast<int>(std::ceil((1.0 + 2.0 * eps) * budget - 1e-9));
}

PartitionedClients identify_outliers(const MetricInstance& inst, const FractionalSolution& frac,
                                     double eps) {
  if (!(eps > 0.0 && eps <= 0.5)) throw InputError("epsilon must lie in (0, 0.5]");
  PartitionedClients part;
  part.outliers.assign(inst.num_groups(), {});
  part.is_outlier.assign(inst.num_clients(), 0);
  const double threshold = 1.0 - eps - kThresholdSlack;
  for (int j = 0; j < inst.num_clients(); ++j) {
    if (frac.z[j] >= threshold) {
      part.is_outlier[j] = 1;
      part.outliers[inst.client(j).group].push_back(j);
    } else {
      part.retained.push_back(j);
    }
  }
  return part;
}

void check_outlier_bound(const PartitionedClients& part, const OutlierBudgets& budgets,
                         BudgetMode mode, double eps) {
  const double factor = 1.0 + 2.0 * eps;
  if (mode == BudgetMode::kPerGroup) {
    for (int g = 0; g < budgets.num_groups(); ++g) {
      const auto used = part.outliers[g].size();
      if (used > factor * budgets.per_group[g] + 1e-6) {
        throw SolverError("group " + std::to_string(g) + " has " + std::to_string(used) +
                          " LP outliers, above (1+2eps) * " +
                          std::to_string(budgets.per_group[g]));
      }
    }
  } else {
    int used = 0;
    for (const auto& g : part.outliers) used += static_cast<int>(g.size());
    if (used > factor * budgets.total() + 1e-6) {
      throw SolverError("LP outliers " + std::to_string(used) + " exceed (1+2eps) * " +
                        std::to_string(budgets.total()));
    }
  }
}

FractionalSolution rescale(const MetricInstance& inst, const FractionalSolution& frac,
                           const PartitionedClients& part, double eps) {
  const int n = inst.num_clients();
  const int m = inst.num_facilities();
  FractionalSolution out;
  out.x.assign(n, {});
  out.z.assign(n, 0.0);
  out.y.assign(m, 0.0);
  std::vector<double> scale(m, 0.0);  // max over served retained clients of 1 / S_j
  for (int j = 0; j < n; ++j) {
    if (part.is_outlier[j]) {
      out.z[j] = 1.0;
      continue;
    }
    double served = 0.0;
    for (const auto& a : frac.x[j]) served += a.value;
    if (served < eps - 1e-9) {
      throw SolverError("retained client " + std::to_string(j) + " is served only " +
                        std::to_string(served));
    }
    for (const auto& a : frac.x[j]) {
      if (a.value <= 0.0) continue;
      out.x[j].push_back({a.facility, a.value / served});
      scale[a.facility] = std::max(scale[a.facility], 1.0 / served);
    }
  }
  for (int i = 0; i < m; ++i) out.y[i] = std::min(1.0, frac.y[i] * scale[i]);
  out.objective_value = fractional_cost(inst, out);

  const double lp_cost = fractional_cost(inst, frac);
  const double bound = lp_cost / eps;
  if (out.objective_value > bound + 1e-6 * std::max(1.0, bound)) {
    throw SolverError("rescaled cost " + std::to_string(out.objective_value) +
                      " exceeds cost(LP) / eps = " + std::to_string(bound));
  }
  return out;
}

IntegralSolution round_facility_location(const MetricInstance& inst,
                                         const FractionalSolution& rescaled,
                                         const PartitionedClients& part,
                                         const RoundingConfig& cfg) {
  validate_rounding_config(cfg);
  const int m = inst.num_facilities();
  std::vector<char> open(m, 0);
  if (cfg.facility_location) {
    for (int i : cfg.facility_location(inst, rescaled, part.retained)) {
      if (i < 0 || i >= m) throw SolverError("facility hook returned an invalid index");
      open[i] = 1;
    }
  } else {
    for (int i = 0; i < m; ++i) {
      if (rescaled.y[i] >= cfg.open_threshold) open[i] = 1;
    }
  }

  if (!part.retained.empty()) {
    if (std::none_of(open.begin(), open.end(), [](char c) { return c != 0; })) {
      std::vector<int> all(m);
      for (int i = 0; i < m; ++i) all[i] = i;
      const int best = best_open_value(rescaled.y, all);
      if (best >= 0) open[best] = 1;
    }
    for (int j : part.retained) {
      const auto allowed = inst.allowed_facilities(j);
      if (std::any_of(allowed.begin(), allowed.end(), [&](int i) { return open[i] != 0; })) {
        continue;
      }
      const int best = best_open_value(rescaled.y, allowed);
      if (best >= 0) open[best] = 1;
    }
  }

  std::vector<int> open_list;
  for (int i = 0; i < m; ++i) {
    if (open[i]) open_list.push_back(i);
  }
  return make_solution(inst, std::move(open_list), part.is_outlier);
}

LprReport round_lp_solution(const MetricInstance& inst, const OutlierBudgets& budgets,
                            BudgetMode mode, const FractionalSolution& lp,
                            const RoundingConfig& cfg) {
  validate_rounding_config(cfg);
  LprReport report;
  report.lp_objective = lp.objective_value;
  PartitionedClients part = identify_outliers(inst, lp, cfg.epsilon);
  check_outlier_bound(part, budgets, mode, cfg.epsilon);
  report.lp_outliers = static_cast<int>(inst.num_clients() - part.retained.size());

  report.zeroed_cost = 0.0;
  for (int i = 0; i < inst.num_facilities(); ++i) {
    report.zeroed_cost += inst.facility(i).open_cost * lp.y[i];
  }
  for (int j : part.retained) {
    for (const auto& a : lp.x[j]) report.zeroed_cost += inst.distance(a.facility, j) * a.value;
  }

  report.rescaled = rescale(inst, lp, part, cfg.epsilon);
  report.rescaled_cost = report.rescaled.objective_value;
  report.solution = round_facility_location(inst, report.rescaled, part, cfg);

  const auto counts = report.solution.outlier_counts();
  if (mode == BudgetMode::kPerGroup) {
    for (int g = 0; g < budgets.num_groups(); ++g) {
      if (counts[g] > violated_budget(budgets.per_group[g], cfg.epsilon)) {
        throw SolverError("rounded solution exceeds the outlier violation bound in group " +
                          std::to_string(g));
      }
    }
  }
  return report;
}

namespace {

LprReport run_lpr(const MetricInstance& inst, const OutlierBudgets& budgets,
                  const RoundingConfig& cfg, BudgetMode mode) {
  validate_rounding_config(cfg);
  validate_budgets(inst, budgets);
  const FlfoLpResult lp = solve_flfo_lp(inst, budgets, mode, cfg.lp);
  LprReport report = round_lp_solution(inst, budgets, mode, lp.solution, cfg);
  report.lp_rounds = lp.rounds;
  report.lp_pivots = lp.pivots;
  return report;
}

}  // namespace

LprReport lpr_f_report(const MetricInstance& inst, const OutlierBudgets& budgets,
                       const RoundingConfig& cfg) {
  return run_lpr(inst, budgets, cfg, BudgetMode::kPerGroup);
}

IntegralSolution lpr_f(const MetricInstance& inst, const OutlierBudgets& budgets,
                       const RoundingConfig& cfg) {
  return lpr_f_report(inst, budgets, cfg).solution;
}

LprReport lpr_nf_report(const MetricInstance& inst, const OutlierBudgets& budgets,
                        const RoundingConfig& cfg) {
  return run_lpr(inst, budgets, cfg, BudgetMode::kAggregate);
}

IntegralSolution lpr_nf(const MetricInstance& inst, const OutlierBudgets& budgets,
                        const RoundingConfig& cfg) {
  return lpr_nf_report(inst, budgets, cfg).solution;
}

}  // namespace fairloc
