#include "fairloc/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "fairloc/error.hpp"

namespace fairloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_size(const MetricInstance& inst) {
  if (inst.num_facilities() > kOracleMaxFacilities) {
    throw InputError("exact solver limited to " + std::to_string(kOracleMaxFacilities) +
                     " facilities, got " + std::to_string(inst.num_facilities()));
  }
}

// Walks every facility subset in Gray-code order, keeping each client's
// nearest open distance from its facilities sorted by distance.
class SubsetWalk {
 public:
  explicit SubsetWalk(const MetricInstance& inst) : inst_(inst), open_(inst.num_facilities(), 0) {
    const int n = inst.num_clients();
    by_distance_.resize(n);
    for (int j = 0; j < n; ++j) {
      auto& list = by_distance_[j];
      list.resize(inst.num_facilities());
      std::iota(list.begin(), list.end(), 0);
      std::stable_sort(list.begin(), list.end(), [&](int a, int b) {
        return inst.distance(a, j) < inst.distance(b, j);
      });
    }
    nearest_.assign(n, kInf);
  }

  // Calls visit(mask, nearest distances) for every subset including the
  // empty one.
  void run(const std::function<void(std::uint32_t, const std::vector<double>&)>& visit) {
    const int m = inst_.num_facilities();
    std::uint32_t mask = 0;
    visit(mask, nearest_);
    for (std::uint32_t step = 1; step < (std::uint32_t{1} << m); ++step) {
      const int bit = std::countr_zero(step);
      mask ^= std::uint32_t{1} << bit;
      open_[bit] = static_cast<char>((mask >> bit) & 1u);
      if (open_[bit]) {
        for (int j = 0; j < inst_.num_clients(); ++j) {
          nearest_[j] = std::min(nearest_[j], inst_.distance(bit, j));
        }
      } else {
        for (int j = 0; j < inst_.num_clients(); ++j) {
          if (inst_.distance(bit, j) > nearest_[j]) continue;
          nearest_[j] = kInf;
          for (int i : by_distance_[j]) {
            if (open_[i]) {
              nearest_[j] = inst_.distance(i, j);
              break;
            }
          }
        }
      }
      visit(mask, nearest_);
    }
  }

 private:
  const MetricInstance& inst_;
  std::vector<char> open_;
  std::vector<std::vector<int>> by_distance_;
  std::vector<double> nearest_;
};

std::vector<int> mask_to_list(std::uint32_t mask, int m) {
  std::vector<int> out;
  for (int i = 0; i < m; ++i) {
    if ((mask >> i) & 1u) out.push_back(i);
  }
  return out;
}

// Tracks the minimum cost, resolving near-ties towards the lexicographically
// smallest open list.
struct BestSubset {
  double cost = kInf;
  std::vector<int> open;
  bool found = false;

  void offer(double c, std::uint32_t mask, int m) {
    if (!std::isfinite(c)) return;
    const double tol = 1e-12 * std::max(1.0, std::abs(cost));
    if (found && c > cost + tol) return;
    std::vector<int> list = mask_to_list(mask, m);
    const bool tie = found && c >= cost - tol;
    if (tie && !(list < open)) return;
    cost = tie ? std::min(cost, c) : c;
    open = std::move(list);
    found = true;
  }
};

// Sum of distances after dropping the l_g largest per group; +inf when a
// client that must be served has no open facility.
double kept_distance(const MetricInstance& inst, const std::vector<int>& budget,
                     const std::vector<double>& nearest, std::vector<std::vector<double>>& scratch) {
  for (auto& s : scratch) s.clear();
  for (int j = 0; j < inst.num_clients(); ++j) scratch[inst.client(j).group].push_back(nearest[j]);
  double total = 0.0;
  for (std::size_t g = 0; g < scratch.size(); ++g) {
    auto& v = scratch[g];
    const std::size_t drop = std::min<std::size_t>(budget[g], v.size());
    std::partial_sort(v.begin(), v.begin() + drop, v.end(), std::greater<>());
    for (std::size_t t = drop; t < v.size(); ++t) total += v[t];
  }
  return total;
}

}  // namespace

std::vector<char> farthest_outliers(const MetricInstance& inst, const OutlierBudgets& budgets,
                                    std::span<const int> open) {
  const int n = inst.num_clients();
  std::vector<double> dist(n, kInf);
  for (int j = 0; j < n; ++j) {
    const int i = nearest_open(inst, j, open);
    if (i >= 0) dist[j] = inst.distance(i, j);
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dist[a] > dist[b]; });
  std::vector<int> left = budgets.per_group;
  std::vector<char> out(n, 0);
  for (int j : order) {
    int& l = left[inst.client(j).group];
    if (l > 0) {
      --l;
      out[j] = 1;
    }
  }
  return out;
}

IntegralSolution exact_flfo(const MetricInstance& inst, const OutlierBudgets& budgets) {
  check_size(inst);
  validate_budgets(inst, budgets);
  const int m = inst.num_facilities();
  std::vector<double> open_cost(m);
  for (int i = 0; i < m; ++i) open_cost[i] = inst.facility(i).open_cost;
  std::vector<std::vector<double>> scratch(inst.num_groups());
  BestSubset best;
  SubsetWalk(inst).run([&](std::uint32_t mask, const std::vector<double>& nearest) {
    double cost = kept_distance(inst, budgets.per_group, nearest, scratch);
    for (int i = 0; i < m; ++i) {
      if ((mask >> i) & 1u) cost += open_cost[i];
    }
    best.offer(cost, mask, m);
  });
  if (!best.found) throw SolverError("no feasible open set");
  return make_solution(inst, best.open, farthest_outliers(inst, budgets, best.open));
}

IntegralSolution exact_kmfo(const MetricInstance& inst, const OutlierBudgets& budgets, int k) {
  check_size(inst);
  validate_budgets(inst, budgets);
  const int m = inst.num_facilities();
  if (k < 1 || k > m) throw InputError("k must lie in [1, m]");
  std::vector<std::vector<double>> scratch(inst.num_groups());
  BestSubset best;
  SubsetWalk(inst).run([&](std::uint32_t mask, const std::vector<double>& nearest) {
    const int size = std::popcount(mask);
    if (size == 0 || size > k) return;
    best.offer(kept_distance(inst, budgets.per_group, nearest, scratch), mask, m);
  });
  return make_solution(inst, best.open, farthest_outliers(inst, budgets, best.open));
}

PenaltySolution exact_kmp(const PenaltyInstance& pinst) {
  const MetricInstance& inst = pinst.base;
  check_size(inst);
  const int m = inst.num_facilities();
  if (pinst.k < 1 || pinst.k > m) throw InputError("k must lie in [1, m]");
  if (static_cast<int>(pinst.penalty.size()) != inst.num_clients()) {
    throw InputError("one penalty per client");
  }
  BestSubset best;
  SubsetWalk(inst).run([&](std::uint32_t mask, const std::vector<double>& nearest) {
    const int size = std::popcount(mask);
    if (size == 0 || size > pinst.k) return;
    double cost = 0.0;
    for (std::size_t j = 0; j < nearest.size(); ++j) cost += std::min(nearest[j], pinst.penalty[j]);
    best.offer(cost, mask, m);
  });
  return evaluate_penalty_solution(pinst, best.open);
}

}  // namespace fairloc
