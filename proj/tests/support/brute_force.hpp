#pragma once

#include <vector>

#include "fairloc/metric.hpp"

namespace fairloc::testing {

// Minimum facility location cost over every open set and every outlier set
// that fits the budgets. Exponential in both n and m.
double brute_force_flfo(const MetricInstance& inst, const OutlierBudgets& budgets);

// Same for k-median: open sets of size 1..k, no opening costs.
double brute_force_kmedian(const MetricInstance& inst, const OutlierBudgets& budgets, int k);

// k-median with penalties: min over open sets of size 1..k of
// sum_j min(d(j, F), p_j).
double brute_force_kmp(const MetricInstance& inst, const std::vector<double>& penalty, int k);

struct NaiveGdf {
  std::vector<int> open;       // ascending
  std::vector<char> connected;
};

// Greedy dual fitting re-derived from scratch at every event: surpluses and
// opening times are recomputed from the full client pool each time.
NaiveGdf naive_gdf(const MetricInstance& inst, const std::vector<int>& group,
                   const std::vector<int>& target);

}  // namespace fairloc::testing
