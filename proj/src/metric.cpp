#include "fairloc/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fairloc/error.hpp"

namespace fairloc {

struct MetricInstance::Data {
  std::vector<Client> clients;
  std::vector<Facility> facilities;
  int num_groups = 0;
  int dimension = 0;
  std::vector<int> all_facilities;
  // Client-major: cache[j * m + i].
  std::vector<double> cache;
};

namespace {

double euclidean(const Point& a, const Point& b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

void check_point(const Point& p, std::size_t dim, const char* what, std::size_t index) {
  if (p.size() != dim) {
    throw InputError(std::string(what) + " " + std::to_string(index) +
                     " has dimension " + std::to_string(p.size()) + ", expected " +
                     std::to_string(dim));
  }
  for (double c : p) {
    if (!std::isfinite(c)) {
      throw InputError(std::string(what) + " " + std::to_string(index) +
                       " has a non-finite coordinate");
    }
  }
}

}  // namespace

MetricInstance::MetricInstance(std::vector<Client> clients,
                               std::vector<Facility> facilities,
                               InstanceOptions options) {
  if (clients.empty()) throw InputError("instance needs at least one client");
  if (facilities.empty()) throw InputError("instance needs at least one facility");
  auto data = std::make_shared<Data>();
  const std::size_t dim = clients.front().point.size();
  if (dim == 0) throw InputError("points must have dimension >= 1");

  int max_group = -1;
  for (std::size_t j = 0; j < clients.size(); ++j) {
    check_point(clients[j].point, dim, "client", j);
    if (clients[j].group < 0) throw InputError("negative group label");
    max_group = std::max(max_group, clients[j].group);
  }
  for (std::size_t i = 0; i < facilities.size(); ++i) {
    check_point(facilities[i].point, dim, "facility", i);
    if (!(facilities[i].open_cost >= 0.0) || !std::isfinite(facilities[i].open_cost)) {
      throw InputError("facility " + std::to_string(i) +
                       " has a negative or non-finite opening cost");
    }
  }
  data->num_groups = options.num_groups > 0 ? options.num_groups : max_group + 1;
  if (max_group >= data->num_groups) {
    throw InputError("group label " + std::to_string(max_group) +
                     " out of range for " + std::to_string(data->num_groups) + " groups");
  }
  data->dimension = static_cast<int>(dim);
  data->all_facilities.resize(facilities.size());
  std::iota(data->all_facilities.begin(), data->all_facilities.end(), 0);

  const std::size_t n = clients.size();
  const std::size_t m = facilities.size();
  if (n * m <= options.cache_limit) {
    data->cache.resize(n * m);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < m; ++i) {
        data->cache[j * m + i] = euclidean(facilities[i].point, clients[j].point);
      }
    }
  }
  data->clients = std::move(clients);
  data->facilities = std::move(facilities);
  data_ = std::move(data);
}

int MetricInstance::num_clients() const { return static_cast<int>(data_->clients.size()); }
int MetricInstance::num_facilities() const {
  return static_cast<int>(data_->facilities.size());
}
int MetricInstance::num_groups() const { return data_->num_groups; }
int MetricInstance::dimension() const { return data_->dimension; }
const Client& MetricInstance::client(int j) const { return data_->clients[j]; }
const Facility& MetricInstance::facility(int i) const { return data_->facilities[i]; }
std::span<const Client> MetricInstance::clients() const { return data_->clients; }
std::span<const Facility> MetricInstance::facilities() const { return data_->facilities; }
bool MetricInstance::has_distance_cache() const { return !data_->cache.empty(); }

double MetricInstance::distance(int i, int j) const {
  if (!data_->cache.empty()) {
    return data_->cache[static_cast<std::size_t>(j) * data_->facilities.size() + i];
  }
  return euclidean(data_->facilities[i].point, data_->clients[j].point);
}

std::vector<int> MetricInstance::group_sizes() const {
  std::vector<int> sizes(data_->num_groups, 0);
  for (const Client& c : data_->clients) ++sizes[c.group];
  return sizes;
}

std::span<const int> MetricInstance::allowed_facilities(int j) const {
  if (!allowed_) return data_->all_facilities;
  const std::size_t begin = allowed_->offsets[j];
  const std::size_t end = allowed_->offsets[j + 1];
  return std::span<const int>(allowed_->facilities).subspan(begin, end - begin);
}

std::size_t MetricInstance::num_allowed_pairs() const {
  if (!allowed_) return data_->clients.size() * data_->facilities.size();
  return allowed_->facilities.size();
}

MetricInstance MetricInstance::with_allowed_pairs(
    std::vector<std::vector<int>> per_client) const {
  if (per_client.size() != data_->clients.size()) {
    throw InputError("allowed pair lists must cover every client");
  }
  auto pairs = std::make_shared<Pairs>();
  pairs->offsets.reserve(per_client.size() + 1);
  pairs->offsets.push_back(0);
  const int m = num_facilities();
  for (std::size_t j = 0; j < per_client.size(); ++j) {
    auto& list = per_client[j];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    if (list.empty()) {
      throw InputError("client " + std::to_string(j) + " has no allowed facility");
    }
    if (list.front() < 0 || list.back() >= m) {
      throw InputError("allowed pair references an unknown facility");
    }
    pairs->facilities.insert(pairs->facilities.end(), list.begin(), list.end());
    pairs->offsets.push_back(pairs->facilities.size());
  }
  MetricInstance out;
  out.data_ = data_;
  out.allowed_ = std::move(pairs);
  return out;
}

int OutlierBudgets::total() const {
  return std::accumulate(per_group.begin(), per_group.end(), 0);
}

void validate_budgets(const MetricInstance& inst, const OutlierBudgets& budgets) {
  if (budgets.num_groups() != inst.num_groups()) {
    throw InputError("budget vector has " + std::to_string(budgets.num_groups()) +
                     " entries but the instance has " +
                     std::to_string(inst.num_groups()) + " groups");
  }
  const auto sizes = inst.group_sizes();
  for (int g = 0; g < inst.num_groups(); ++g) {
    if (budgets.per_group[g] < 0 || budgets.per_group[g] > sizes[g]) {
      throw InputError("budget for group " + std::to_string(g) + " must lie in [0, " +
                       std::to_string(sizes[g]) + "]");
    }
  }
}

std::vector<int> IntegralSolution::outlier_counts() const {
  std::vector<int> counts;
  counts.reserve(outliers.size());
  for (const auto& g : outliers) counts.push_back(static_cast<int>(g.size()));
  return counts;
}

int IntegralSolution::num_outliers() const {
  int total = 0;
  for (const auto& g : outliers) total += static_cast<int>(g.size());
  return total;
}

int nearest_open(const MetricInstance& inst, int j, std::span<const int> open) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i : open) {
    const double d = inst.distance(i, j);
    if (d < best_d || (d == best_d && i < best)) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

IntegralSolution make_solution(const MetricInstance& inst, std::vector<int> open,
                               const std::vector<char>& is_outlier) {
  const int n = inst.num_clients();
  if (static_cast<int>(is_outlier.size()) != n) {
    throw InputError("outlier mask size does not match the client count");
  }
  std::sort(open.begin(), open.end());
  open.erase(std::unique(open.begin(), open.end()), open.end());

  IntegralSolution sol;
  sol.outliers.assign(inst.num_groups(), {});
  sol.assignment.assign(n, -1);
  for (int i : open) sol.facility_cost += inst.facility(i).open_cost;
  for (int j = 0; j < n; ++j) {
    if (is_outlier[j]) {
      sol.outliers[inst.client(j).group].push_back(j);
      continue;
    }
    const int i = nearest_open(inst, j, open);
    if (i < 0) throw InputError("non-outlier client with no open facility");
    sol.assignment[j] = i;
    sol.connection_cost += inst.distance(i, j);
  }
  sol.open = std::move(open);
  return sol;
}

double solution_cost(const MetricInstance& inst, const IntegralSolution& sol,
                     Objective objective) {
  std::vector<char> is_open(inst.num_facilities(), 0);
  for (int i : sol.open) {
    if (i < 0 || i >= inst.num_facilities()) throw InputError("unknown open facility");
    is_open[i] = 1;
  }
  std::vector<char> is_outlier(inst.num_clients(), 0);
  for (const auto& group : sol.outliers) {
    for (int j : group) is_outlier[j] = 1;
  }
  double connection = 0.0;
  for (int j = 0; j < inst.num_clients(); ++j) {
    const int i = sol.assignment[j];
    if (is_outlier[j]) continue;
    if (i < 0) throw InputError("client " + std::to_string(j) + " is not assigned");
    if (!is_open[i]) {
      throw InputError("client " + std::to_string(j) + " is assigned to closed facility " +
                       std::to_string(i));
    }
    connection += inst.distance(i, j);
  }
  if (objective == Objective::kKMedian) return connection;
  double facility = 0.0;
  for (int i : sol.open) facility += inst.facility(i).open_cost;
  return facility + connection;
}

double unfairness(const OutlierBudgets& budgets, std::span<const int> outlier_counts) {
  double worst = 1.0;
  for (std::size_t g = 0; g < outlier_counts.size(); ++g) {
    const int used = outlier_counts[g];
    const int allowed = g < budgets.per_group.size() ? budgets.per_group[g] : 0;
    if (used == 0) continue;
    if (allowed == 0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, static_cast<double>(used) / allowed);
  }
  return worst;
}

double unfairness(const OutlierBudgets& budgets, const IntegralSolution& sol) {
  const auto counts = sol.outlier_counts();
  return unfairness(budgets, counts);
}

MetricInstance prune_pairs(const MetricInstance& inst) {
  if (inst.has_allowed_pairs()) throw InputError("instance already has allowed pairs");
  const int n = inst.num_clients();
  const int m = inst.num_facilities();
  std::vector<double> all;
  all.reserve(static_cast<std::size_t>(n) * m);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) all.push_back(inst.distance(i, j));
  }
  const std::size_t count = all.size();
  const std::size_t mid = count / 2;
  std::nth_element(all.begin(), all.begin() + mid, all.end());
  double median = all[mid];
  if (count % 2 == 0) {
    const double lower = *std::max_element(all.begin(), all.begin() + mid);
    median = 0.5 * (lower + median);
  }

  std::vector<std::vector<int>> per_client(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) {
      if (inst.distance(i, j) < median) per_client[j].push_back(i);
    }
    if (per_client[j].empty()) {
      std::vector<int> everyone(m);
      std::iota(everyone.begin(), everyone.end(), 0);
      per_client[j].push_back(nearest_open(inst, j, everyone));
    }
  }
  return inst.with_allowed_pairs(std::move(per_client));
}

}  // namespace fairloc
