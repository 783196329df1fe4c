#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace fairloc {

using Point = std::vector<double>;

struct Client {
  Point point;
  int group = 0;
};

struct Facility {
  Point point;
  double open_cost = 0.0;
};

struct InstanceOptions {
  // Dense distance cache is built when clients * facilities <= cache_limit.
  std::size_t cache_limit = std::size_t{5000} * 200;
  // 0 means "max group label + 1".
  int num_groups = 0;
};

// Clients with group labels and candidate facilities in a shared Euclidean
// space. Immutable once constructed; copies share the underlying storage, so
// instances are cheap to pass around and safe to read from many threads.
class MetricInstance {
 public:
  MetricInstance(std::vector<Client> clients, std::vector<Facility> facilities,
                 InstanceOptions options = {});

  int num_clients() const;
  int num_facilities() const;
  int num_groups() const;
  int dimension() const;

  const Client& client(int j) const;
  const Facility& facility(int i) const;
  std::span<const Client> clients() const;
  std::span<const Facility> facilities() const;

  // Euclidean distance between facility i and client j.
  double distance(int i, int j) const;

  // Clients per group, indexed by group.
  std::vector<int> group_sizes() const;

  // Facilities client j may be assigned to in the LP, ascending by index.
  // Without an explicit pair set every facility is allowed.
  std::span<const int> allowed_facilities(int j) const;
  bool has_allowed_pairs() const { return allowed_ != nullptr; }
  std::size_t num_allowed_pairs() const;

  // Copy of this instance restricted to the given per-client facility lists.
  // Every list must be non-empty; lists are sorted and deduplicated.
  MetricInstance with_allowed_pairs(std::vector<std::vector<int>> per_client) const;

  bool has_distance_cache() const;

 private:
  struct Data;
  struct Pairs {
    std::vector<std::size_t> offsets;
    std::vector<int> facilities;
  };
  MetricInstance() = default;

  std::shared_ptr<const Data> data_;
  std::shared_ptr<const Pairs> allowed_;
};

struct OutlierBudgets {
  std::vector<int> per_group;

  int total() const;
  int num_groups() const { return static_cast<int>(per_group.size()); }
};

// Throws InputError unless budgets has one entry per group and
// 0 <= l_g <= |C_g|.
void validate_budgets(const MetricInstance& inst, const OutlierBudgets& budgets);

enum class Objective { kFacilityLocation, kKMedian };

struct IntegralSolution {
  std::vector<int> open;                   // ascending facility indices
  std::vector<std::vector<int>> outliers;  // per group, ascending clients
  std::vector<int> assignment;             // facility per client, -1 if outlier
  double facility_cost = 0.0;
  double connection_cost = 0.0;

  std::vector<int> outlier_counts() const;
  int num_outliers() const;
};

// Index of the open facility nearest to client j; ties go to the lowest index.
// Returns -1 when `open` is empty.
int nearest_open(const MetricInstance& inst, int j, std::span<const int> open);

// Builds a solution from an open set and an outlier mask, assigning every
// other client to its nearest open facility over the full metric.
IntegralSolution make_solution(const MetricInstance& inst, std::vector<int> open,
                               const std::vector<char>& is_outlier);

// Recomputes the objective from the open set and assignment. Throws
// InputError if a client is assigned to a closed facility or a non-outlier
// client is unassigned.
double solution_cost(const MetricInstance& inst, const IntegralSolution& sol,
                     Objective objective);

// max(1, max_g l'_g / l_g). A group with l_g = 0 and any outlier yields +inf.
double unfairness(const OutlierBudgets& budgets, const IntegralSolution& sol);
double unfairness(const OutlierBudgets& budgets, std::span<const int> outlier_counts);

// Keeps facility-client pairs strictly closer than the median of all pair
// distances. A client left with no pair keeps its nearest facility.
MetricInstance prune_pairs(const MetricInstance& inst);

}  // namespace fairloc
