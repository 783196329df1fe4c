#pragma once

#include <vector>

#include "fairloc/metric.hpp"

namespace fairloc {

struct FacilityOpening {
  int facility;
  double time;
  // Sum over still-unconnected clients of max(0, time - d_ij), recomputed
  // from scratch at the moment of opening.
  double surplus;
};

// Final state of a greedy dual-fitting run plus the event history.
struct DualState {
  // Time at which each client connected or withdrew.
  std::vector<double> alpha;
  std::vector<char> connected;
  std::vector<char> withdrawn;
  // Facility each client connected to when it connected; -1 otherwise.
  std::vector<int> connected_to;
  std::vector<int> open;  // in opening order
  std::vector<double> residual_cost;
  std::vector<int> coverage_target;  // |C_g| - l_g
  std::vector<char> active_groups;
  std::vector<FacilityOpening> openings;
  // Global time after every processed event; non-decreasing.
  std::vector<double> event_times;
};

struct GdfResult {
  IntegralSolution solution;
  DualState state;
};

// Fair greedy dual fitting: one global dual time grows, unconnected clients
// pay towards closed facilities, and each group stops once |C_g| - l_g of its
// clients are connected. Remaining clients of a finished group are outliers.
GdfResult gdf_f_run(const MetricInstance& inst, const OutlierBudgets& budgets);
IntegralSolution gdf_f(const MetricInstance& inst, const OutlierBudgets& budgets);

// Same process with a single coverage target n - total_budget across all
// clients. Outliers are still reported under their own groups.
GdfResult gdf_nf_run(const MetricInstance& inst, int total_budget);
IntegralSolution gdf_nf(const MetricInstance& inst, int total_budget);

}  // namespace fairloc
