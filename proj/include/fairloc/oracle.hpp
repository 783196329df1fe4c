#pragma once

#include "fairloc/kmedian.hpp"
#include "fairloc/metric.hpp"

namespace fairloc {

// Largest facility count the exact solvers accept.
inline constexpr int kOracleMaxFacilities = 20;

// Exact facility location with fair outliers by enumerating every facility
// subset. For a fixed open set each group drops its l_g farthest clients.
// Ties go to the lexicographically smallest open set.
IntegralSolution exact_flfo(const MetricInstance& inst, const OutlierBudgets& budgets);

// Exact k-median with fair outliers over all open sets of size 1..k.
IntegralSolution exact_kmfo(const MetricInstance& inst, const OutlierBudgets& budgets, int k);

// Exact k-median with penalties over all open sets of size 1..k.
PenaltySolution exact_kmp(const PenaltyInstance& pinst);

// Outlier mask dropping, per group, the l_g clients farthest from `open`
// (ties: lower client index first). Exposed for cross-checks.
std::vector<char> farthest_outliers(const MetricInstance& inst, const OutlierBudgets& budgets,
                                    std::span<const int> open);

}  // namespace fairloc
