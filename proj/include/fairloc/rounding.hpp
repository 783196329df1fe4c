#pragma once

#include <functional>
#include <vector>

#include "fairloc/lp.hpp"
#include "fairloc/metric.hpp"

namespace fairloc {

// Replaces the threshold step: given the instance, the rescaled fractional
// solution and the retained clients, return the facilities to open. Any
// alpha-approximate facility location routine fits here.
using FacilityLocationHook = std::function<std::vector<int>(
    const MetricInstance&, const FractionalSolution&, const std::vector<int>& retained)>;

struct RoundingConfig {
  // Clients with z_j >= 1 - epsilon become outliers. Must lie in (0, 0.5].
  double epsilon = 0.5;
  // Facilities with rescaled y'_i >= open_threshold are opened. In (0, 1].
  double open_threshold = 0.5;
  FacilityLocationHook facility_location;
  FlfoLpOptions lp;
};

void validate_rounding_config(const RoundingConfig& cfg);

struct PartitionedClients {
  std::vector<std::vector<int>> outliers;  // per group, ascending
  std::vector<int> retained;               // ascending
  std::vector<char> is_outlier;            // per client
  std::vector<int> outlier_counts() const;
};

// Splits clients by the LP outlier value z_j >= 1 - eps.
PartitionedClients identify_outliers(const MetricInstance& inst, const FractionalSolution& frac,
                                     double eps);

// Throws SolverError unless the partition respects
// |C_o ∩ C_g| <= (1 + 2 eps) l_g per group (kPerGroup) or in total
// (kAggregate).
void check_outlier_bound(const PartitionedClients& part, const OutlierBudgets& budgets,
                         BudgetMode mode, double eps);

// Drops the assignments of outliers and scales every retained client to full
// service; facility values grow by the largest scale among the clients they
// serve, capped at one. Facilities serving no retained client drop to zero.
// Throws SolverError if a retained client is served less than eps or if the
// result costs more than cost(frac) / eps.
FractionalSolution rescale(const MetricInstance& inst, const FractionalSolution& frac,
                           const PartitionedClients& part, double eps);

// Threshold rounding with fallbacks, then nearest-open assignment of the
// retained clients over the full metric.
IntegralSolution round_facility_location(const MetricInstance& inst,
                                         const FractionalSolution& rescaled,
                                         const PartitionedClients& part,
                                         const RoundingConfig& cfg);

struct LprReport {
  IntegralSolution solution;
  double lp_objective = 0.0;
  double zeroed_cost = 0.0;    // LP solution with outlier assignments removed
  double rescaled_cost = 0.0;
  int lp_outliers = 0;
  int lp_rounds = 0;
  long lp_pivots = 0;
  FractionalSolution rescaled;
};

// Rounds an already solved LP. `mode` selects which outlier bound is checked.
LprReport round_lp_solution(const MetricInstance& inst, const OutlierBudgets& budgets,
                            BudgetMode mode, const FractionalSolution& lp,
                            const RoundingConfig& cfg);

// Fair LP rounding. Per-group outliers obey l'_g <= ceil((1 + 2 eps) l_g).
LprReport lpr_f_report(const MetricInstance& inst, const OutlierBudgets& budgets,
                       const RoundingConfig& cfg = {});
IntegralSolution lpr_f(const MetricInstance& inst, const OutlierBudgets& budgets,
                       const RoundingConfig& cfg = {});

// Same pipeline with one aggregate outlier budget of budgets.total().
LprReport lpr_nf_report(const MetricInstance& inst, const OutlierBudgets& budgets,
                        const RoundingConfig& cfg = {});
IntegralSolution lpr_nf(const MetricInstance& inst, const OutlierBudgets& budgets,
                        const RoundingConfig& cfg = {});

// ceil((1 + 2 eps) l) with a small slack against rounding noise.
int violated_budget(int budget, double eps);

}  // namespace fairloc
