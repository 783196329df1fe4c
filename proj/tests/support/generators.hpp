#pragma once

#include <random>
#include <vector>

#include "fairloc/metric.hpp"

namespace fairloc::testing {

struct RandomInstanceSpec {
  int clients = 8;
  int facilities = 4;
  int groups = 2;
  int dimension = 2;
  double coord_scale = 10.0;
  double max_open_cost = 8.0;
};

// Uniform points in [0, coord_scale]^d, every group non-empty.
MetricInstance random_instance(std::mt19937_64& rng, const RandomInstanceSpec& spec);

// Per-group budgets uniform in [0, |C_g|].
OutlierBudgets random_budgets(std::mt19937_64& rng, const MetricInstance& inst);

// Points on a line: clients at client_x, facilities at facility_x.
MetricInstance line_instance(const std::vector<double>& client_x,
                             const std::vector<double>& facility_x,
                             const std::vector<double>& open_costs,
                             const std::vector<int>& groups = {});

}  // namespace fairloc::testing
