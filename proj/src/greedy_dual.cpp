#include "fairloc/greedy_dual.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <tuple>

#include "fairloc/error.hpp"

namespace fairloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Event {
  double time;
  int facility;
  int client;  // -1 for an opening

  bool operator<(const Event& o) const {
    return std::tie(time, facility, client) < std::tie(o.time, o.facility, o.client);
  }
  bool operator>(const Event& o) const { return o < *this; }
};

class GreedyDual {
 public:
  GreedyDual(const MetricInstance& inst, std::vector<int> group, std::vector<int> target)
      : inst_(inst),
        n_(inst.num_clients()),
        m_(inst.num_facilities()),
        group_(std::move(group)),
        in_pool_(n_, 1),
        is_open_(m_, 0),
        order_(m_),
        rank_(static_cast<std::size_t>(m_) * n_),
        ptr_(m_, 0),
        count_(m_, 0),
        dist_sum_(m_, 0.0) {
    const int groups = static_cast<int>(target.size());
    state_.alpha.assign(n_, 0.0);
    state_.connected.assign(n_, 0);
    state_.withdrawn.assign(n_, 0);
    state_.connected_to.assign(n_, -1);
    state_.coverage_target = std::move(target);
    state_.active_groups.assign(groups, 1);
    connected_in_group_.assign(groups, 0);
    members_.assign(groups, {});
    for (int j = 0; j < n_; ++j) members_[group_[j]].push_back(j);
    for (int i = 0; i < m_; ++i) {
      auto& ord = order_[i];
      ord.resize(n_);
      std::iota(ord.begin(), ord.end(), 0);
      std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) {
        return inst_.distance(i, a) < inst_.distance(i, b);
      });
      for (int r = 0; r < n_; ++r) rank_[static_cast<std::size_t>(i) * n_ + ord[r]] = r;
    }
  }

  GdfResult run() {
    for (int g = 0; g < static_cast<int>(members_.size()); ++g) check_group(g);
    while (std::any_of(state_.active_groups.begin(), state_.active_groups.end(),
                       [](char a) { return a != 0; })) {
      Event next{kInf, m_, n_};
      for (int i = 0; i < m_; ++i) {
        if (is_open_[i]) continue;
        const Event e{opening_time(i), i, -1};
        if (e < next) next = e;
      }
      while (!arrivals_.empty() && !in_pool_[arrivals_.top().client]) arrivals_.pop();
      if (!arrivals_.empty() && arrivals_.top() < next) next = arrivals_.top();
      if (next.time == kInf) throw SolverError("greedy dual fitting stalled");

      now_ = std::max(now_, next.time);
      state_.event_times.push_back(now_);
      if (next.client < 0) {
        open_facility(next.facility);
      } else {
        arrivals_.pop();
        connect(next.client, next.facility);
      }
    }

    state_.residual_cost.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (!is_open_[i]) {
        state_.residual_cost[i] = std::max(0.0, inst_.facility(i).open_cost - surplus(i));
      }
    }
    std::vector<int> open = state_.open;
    std::sort(open.begin(), open.end());
    std::vector<char> is_outlier(n_);
    for (int j = 0; j < n_; ++j) is_outlier[j] = state_.connected[j] ? 0 : 1;
    GdfResult result;
    result.solution = make_solution(inst_, std::move(open), is_outlier);
    result.state = std::move(state_);
    return result;
  }

 private:
  double d(int i, int j) const { return inst_.distance(i, j); }

  // Earliest time the surplus of closed facility i reaches f_i, assuming the
  // pool of unconnected clients stays as it is.
  double opening_time(int i) {
    const double f = inst_.facility(i).open_cost;
    if (f <= 0.0) return now_;
    auto& ptr = ptr_[i];
    const auto& ord = order_[i];
    for (;;) {
      while (ptr < n_ && !in_pool_[ord[ptr]]) ++ptr;
      const double t = count_[i] > 0 ? (f + dist_sum_[i]) / count_[i] : kInf;
      if (ptr < n_ && d(i, ord[ptr]) < t) {
        ++count_[i];
        dist_sum_[i] += d(i, ord[ptr]);
        ++ptr;
        continue;
      }
      return std::max(t, now_);
    }
  }

  double surplus(int i) const {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) {
      if (in_pool_[j]) s += std::max(0.0, now_ - d(i, j));
    }
    return s;
  }

  void leave_pool(int j) {
    in_pool_[j] = 0;
    for (int i = 0; i < m_; ++i) {
      if (is_open_[i] || rank_[static_cast<std::size_t>(i) * n_ + j] >= ptr_[i]) continue;
      --count_[i];
      dist_sum_[i] -= d(i, j);
      if (count_[i] == 0) dist_sum_[i] = 0.0;
    }
  }

  void open_facility(int i) {
    state_.openings.push_back({i, now_, surplus(i)});
    is_open_[i] = 1;
    state_.open.push_back(i);

    const double reach = now_ + 1e-12 * std::max(1.0, now_);
    std::vector<int> in_range;
    for (int j = 0; j < n_; ++j) {
      if (!in_pool_[j]) continue;
      if (d(i, j) <= reach) {
        in_range.push_back(j);
      } else {
        arrivals_.push({d(i, j), i, j});
      }
    }
    std::stable_sort(in_range.begin(), in_range.end(),
                     [&](int a, int b) { return d(i, a) < d(i, b); });
    for (int j : in_range) {
      if (in_pool_[j]) connect(j, nearest_open(inst_, j, state_.open));
    }
  }

  void connect(int j, int facility) {
    if (!in_pool_[j]) return;
    leave_pool(j);
    state_.connected[j] = 1;
    state_.connected_to[j] = facility;
    state_.alpha[j] = now_;
    const int g = group_[j];
    ++connected_in_group_[g];
    check_group(g);
  }

  void check_group(int g) {
    if (!state_.active_groups[g] || connected_in_group_[g] < state_.coverage_target[g]) return;
    state_.active_groups[g] = 0;
    for (int j : members_[g]) {
      if (!in_pool_[j]) continue;
      leave_pool(j);
      state_.withdrawn[j] = 1;
      state_.alpha[j] = now_;
    }
  }

  const MetricInstance& inst_;
  const int n_;
  const int m_;
  std::vector<int> group_;
  std::vector<std::vector<int>> members_;
  std::vector<int> connected_in_group_;
  std::vector<char> in_pool_;
  std::vector<char> is_open_;
  // Per facility: clients by ascending distance, each client's rank in that
  // order, and the counted prefix [0, ptr) of pool clients with its size and
  // distance sum.
  std::vector<std::vector<int>> order_;
  std::vector<int> rank_;
  std::vector<int> ptr_;
  std::vector<int> count_;
  std::vector<double> dist_sum_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> arrivals_;
  double now_ = 0.0;
  DualState state_;
};

}  // namespace

GdfResult gdf_f_run(const MetricInstance& inst, const OutlierBudgets& budgets) {
  validate_budgets(inst, budgets);
  std::vector<int> group(inst.num_clients());
  for (int j = 0; j < inst.num_clients(); ++j) group[j] = inst.client(j).group;
  std::vector<int> target = inst.group_sizes();
  for (int g = 0; g < inst.num_groups(); ++g) target[g] -= budgets.per_group[g];
  return GreedyDual(inst, std::move(group), std::move(target)).run();
}

IntegralSolution gdf_f(const MetricInstance& inst, const OutlierBudgets& budgets) {
  return gdf_f_run(inst, budgets).solution;
}

GdfResult gdf_nf_run(const MetricInstance& inst, int total_budget) {
  const int n = inst.num_clients();
  if (total_budget < 0 || total_budget > n) {
    throw InputError("total outlier budget " + std::to_string(total_budget) +
                     " outside [0, " + std::to_string(n) + "]");
  }
  return GreedyDual(inst, std::vector<int>(n, 0), {n - total_budget}).run();
}

IntegralSolution gdf_nf(const MetricInstance& inst, int total_budget) {
  return gdf_nf_run(inst, total_budget).solution;
}

}  // namespace fairloc
