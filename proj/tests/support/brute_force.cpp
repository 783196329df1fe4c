#include "brute_force.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace fairloc::testing {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double nearest(const MetricInstance& inst, unsigned mask, int j) {
  double best = kInf;
  for (int i = 0; i < inst.num_facilities(); ++i) {
    if (mask >> i & 1u) best = std::min(best, inst.distance(i, j));
  }
  return best;
}

double best_outlier_choice(const MetricInstance& inst, const OutlierBudgets& budgets,
                           unsigned facilities) {
  const int n = inst.num_clients();
  if (n > 16) throw std::invalid_argument("brute force limited to 16 clients");
  double best = kInf;
  for (unsigned out = 0; out < (1u << n); ++out) {
    std::vector<int> used(inst.num_groups(), 0);
    double cost = 0.0;
    for (int j = 0; j < n; ++j) {
      if (out >> j & 1u) {
        ++used[inst.client(j).group];
      } else {
        cost += nearest(inst, facilities, j);
      }
    }
    bool fits = true;
    for (int g = 0; g < inst.num_groups(); ++g) fits = fits && used[g] <= budgets.per_group[g];
    if (fits) best = std::min(best, cost);
  }
  return best;
}

}  // namespace

double brute_force_flfo(const MetricInstance& inst, const OutlierBudgets& budgets) {
  double best = kInf;
  for (unsigned f = 0; f < (1u << inst.num_facilities()); ++f) {
    double open_cost = 0.0;
    for (int i = 0; i < inst.num_facilities(); ++i) {
      if (f >> i & 1u) open_cost += inst.facility(i).open_cost;
    }
    best = std::min(best, open_cost + best_outlier_choice(inst, budgets, f));
  }
  return best;
}

double brute_force_kmedian(const MetricInstance& inst, const OutlierBudgets& budgets, int k) {
  double best = kInf;
  for (unsigned f = 1; f < (1u << inst.num_facilities()); ++f) {
    if (__builtin_popcount(f) > k) continue;
    best = std::min(best, best_outlier_choice(inst, budgets, f));
  }
  return best;
}

double brute_force_kmp(const MetricInstance& inst, const std::vector<double>& penalty, int k) {
  double best = kInf;
  for (unsigned f = 1; f < (1u << inst.num_facilities()); ++f) {
    if (__builtin_popcount(f) > k) continue;
    double cost = 0.0;
    for (int j = 0; j < inst.num_clients(); ++j) {
      cost += std::min(nearest(inst, f, j), penalty[j]);
    }
    best = std::min(best, cost);
  }
  return best;
}

NaiveGdf naive_gdf(const MetricInstance& inst, const std::vector<int>& group,
                   const std::vector<int>& target) {
  const int n = inst.num_clients();
  const int m = inst.num_facilities();
  const int groups = static_cast<int>(target.size());
  std::vector<char> pool(n, 1), open(m, 0), active(groups, 1);
  std::vector<int> done(groups, 0);
  NaiveGdf out;
  out.connected.assign(n, 0);
  double now = 0.0;

  auto check = [&](int g) {
    if (!active[g] || done[g] < target[g]) return;
    active[g] = 0;
    for (int j = 0; j < n; ++j) {
      if (group[j] == g) pool[j] = 0;
    }
  };
  auto connect = [&](int j) {
    if (!pool[j]) return;
    pool[j] = 0;
    out.connected[j] = 1;
    ++done[group[j]];
    check(group[j]);
  };
  for (int g = 0; g < groups; ++g) check(g);

  using Event = std::tuple<double, int, int>;
  while (std::count(active.begin(), active.end(), 1) > 0) {
    Event best{kInf, m, n};
    for (int i = 0; i < m; ++i) {
      if (open[i]) {
        for (int j = 0; j < n; ++j) {
          if (pool[j]) best = std::min(best, Event{std::max(now, inst.distance(i, j)), i, j});
        }
        continue;
      }
      const double f = inst.facility(i).open_cost;
      double t = kInf;
      if (f <= 0.0) {
        t = now;
      } else {
        std::vector<double> d;
        for (int j = 0; j < n; ++j) {
          if (pool[j]) d.push_back(inst.distance(i, j));
        }
        std::sort(d.begin(), d.end());
        double sum = 0.0;
        for (std::size_t k = 0; k < d.size(); ++k) {
          sum += d[k];
          const double tk = (f + sum) / static_cast<double>(k + 1);
          if (k + 1 == d.size() || tk <= d[k + 1]) {
            t = std::max(now, tk);
            break;
          }
        }
      }
      best = std::min(best, Event{t, i, -1});
    }
    auto [t, i, j] = best;
    if (t == kInf) throw std::runtime_error("naive greedy dual stalled");
    now = std::max(now, t);
    if (j >= 0) {
      connect(j);
      continue;
    }
    open[i] = 1;
    std::vector<std::pair<double, int>> reach;
    for (int c = 0; c < n; ++c) {
      if (pool[c] && inst.distance(i, c) <= now + 1e-12 * std::max(1.0, now)) {
        reach.push_back({inst.distance(i, c), c});
      }
    }
    std::sort(reach.begin(), reach.end());
    for (auto [d, c] : reach) connect(c);
  }
  for (int i = 0; i < m; ++i) {
    if (open[i]) out.open.push_back(i);
  }
  return out;
}

}  // namespace fairloc::testing
