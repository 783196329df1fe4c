#include "generators.hpp"

namespace fairloc::testing {

MetricInstance random_instance(std::mt19937_64& rng, const RandomInstanceSpec& spec) {
  std::uniform_real_distribution<double> coord(0.0, spec.coord_scale);
  std::uniform_real_distribution<double> cost(0.0, spec.max_open_cost);
  std::uniform_int_distribution<int> group(0, spec.groups - 1);
  auto point = [&] {
    Point p(spec.dimension);
    for (double& c : p) c = coord(rng);
    return p;
  };
  std::vector<Client> clients;
  for (int j = 0; j < spec.clients; ++j) {
    clients.push_back({point(), j < spec.groups ? j : group(rng)});
  }
  std::vector<Facility> facilities;
  for (int i = 0; i < spec.facilities; ++i) facilities.push_back({point(), cost(rng)});
  InstanceOptions options;
  options.num_groups = spec.groups;
  return MetricInstance(std::move(clients), std::move(facilities), options);
}

OutlierBudgets random_budgets(std::mt19937_64& rng, const MetricInstance& inst) {
  OutlierBudgets budgets;
  for (int size : inst.group_sizes()) {
    std::uniform_int_distribution<int> pick(0, size);
    budgets.per_group.push_back(pick(rng));
  }
  return budgets;
}

MetricInstance line_instance(const std::vector<double>& client_x,
                             const std::vector<double>& facility_x,
                             const std::vector<double>& open_costs,
                             const std::vector<int>& groups) {
  std::vector<Client> clients;
  for (std::size_t j = 0; j < client_x.size(); ++j) {
    clients.push_back({{client_x[j]}, groups.empty() ? 0 : groups[j]});
  }
  std::vector<Facility> facilities;
  for (std::size_t i = 0; i < facility_x.size(); ++i) {
    facilities.push_back({{facility_x[i]}, open_costs.empty() ? 0.0 : open_costs[i]});
  }
  return MetricInstance(std::move(clients), std::move(facilities));
}

}  // namespace fairloc::testing
