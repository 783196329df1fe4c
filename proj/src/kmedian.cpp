#include "fairloc/kmedian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "fairloc/error.hpp"

namespace fairloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_k(const MetricInstance& inst, int k) {
  if (k < 1 || k > inst.num_facilities()) {
    throw InputError("k = " + std::to_string(k) + " must lie in [1, " +
                     std::to_string(inst.num_facilities()) + "]");
  }
}

// Nearest and second-nearest open distances per client.
struct NearestTable {
  std::vector<double> d1, d2;
  std::vector<int> near1;

  void rebuild(const MetricInstance& inst, const std::vector<int>& open) {
    const int n = inst.num_clients();
    d1.assign(n, kInf);
    d2.assign(n, kInf);
    near1.assign(n, -1);
    for (int j = 0; j < n; ++j) {
      for (int i : open) {
        const double d = inst.distance(i, j);
        if (d < d1[j]) {
          d2[j] = d1[j];
          d1[j] = d;
          near1[j] = i;
        } else if (d < d2[j]) {
          d2[j] = d;
        }
      }
    }
  }
};

double penalty_cost(const NearestTable& t, const std::vector<double>& p) {
  double cost = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) cost += std::min(t.d1[j], p[j]);
  return cost;
}

}  // namespace

PenaltySolution evaluate_penalty_solution(const PenaltyInstance& pinst, std::vector<int> open) {
  const MetricInstance& inst = pinst.base;
  std::sort(open.begin(), open.end());
  open.erase(std::unique(open.begin(), open.end()), open.end());
  PenaltySolution sol;
  const int n = inst.num_clients();
  sol.paying.assign(n, 0);
  sol.assignment.assign(n, -1);
  for (int j = 0; j < n; ++j) {
    const int i = nearest_open(inst, j, open);
    const double d = i < 0 ? kInf : inst.distance(i, j);
    if (pinst.penalty[j] < d) {
      sol.paying[j] = 1;
      sol.penalty_paid += pinst.penalty[j];
    } else {
      sol.assignment[j] = i;
      sol.service_cost += d;
    }
  }
  sol.open = std::move(open);
  return sol;
}

PenaltySolution local_search_penalties(const PenaltyInstance& pinst, double improve_frac,
                                       LocalSearchStats* stats) {
  const MetricInstance& inst = pinst.base;
  const int n = inst.num_clients();
  const int m = inst.num_facilities();
  const int k = pinst.k;
  check_k(inst, k);
  if (static_cast<int>(pinst.penalty.size()) != n) throw InputError("one penalty per client");
  if (!(improve_frac > 0.0 && improve_frac < 1.0)) {
    throw InputError("improvement fraction must lie in (0, 1)");
  }

  std::vector<int> open(k);
  std::iota(open.begin(), open.end(), 0);
  std::vector<char> is_open(m, 0);
  for (int i : open) is_open[i] = 1;
  NearestTable table;
  table.rebuild(inst, open);
  double cost = penalty_cost(table, pinst.penalty);
  LocalSearchStats local;
  local.initial_cost = cost;

  bool improved = true;
  while (improved) {
    improved = false;
    for (int slot = 0; slot < k && !improved; ++slot) {
      const int out = open[slot];
      for (int in = 0; in < m && !improved; ++in) {
        if (is_open[in]) continue;
        ++local.evaluations;
        const double target = cost - improve_frac * cost;
        double next = 0.0;
        for (int j = 0; j < n && next <= target; ++j) {
          const double kept = table.near1[j] == out ? table.d2[j] : table.d1[j];
          next += std::min(pinst.penalty[j], std::min(kept, inst.distance(in, j)));
        }
        if (next <= target && next < cost) {
          is_open[out] = 0;
          is_open[in] = 1;
          open[slot] = in;
          std::sort(open.begin(), open.end());
          table.rebuild(inst, open);
          cost = penalty_cost(table, pinst.penalty);
          ++local.swaps;
          improved = true;
        }
      }
    }
  }
  local.final_cost = cost;
  if (stats) *stats = local;
  return evaluate_penalty_solution(pinst, open);
}

PenaltyInstance make_penalties(const MetricInstance& inst, const OutlierBudgets& budgets,
                               double guess, double gamma, int k) {
  if (!(gamma > 0.0)) throw InputError("gamma must be positive");
  if (!(guess >= 0.0) || !std::isfinite(guess)) throw InputError("cost guess must be finite");
  if (budgets.num_groups() != inst.num_groups()) throw InputError("one budget per group");
  PenaltyInstance pinst{inst, k, std::vector<double>(inst.num_clients())};
  for (int j = 0; j < inst.num_clients(); ++j) {
    const int l = budgets.per_group[inst.client(j).group];
    pinst.penalty[j] = l == 0 ? kInf : guess / (gamma * l);
  }
  return pinst;
}

GuessGrid build_guess_grid(double lo, double hi, double eps_guess) {
  if (!(eps_guess > 0.0)) throw InputError("grid epsilon must be positive");
  if (!(lo >= 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
    throw InputError("grid needs 0 <= lo <= hi < inf");
  }
  GuessGrid grid{lo, hi, 1.0 + eps_guess, {}};
  if (lo == 0.0 || lo == hi) {
    grid.values.push_back(lo);
    return grid;
  }
  const int steps =
      static_cast<int>(std::ceil(std::log(hi / lo) / std::log(grid.ratio) - 1e-9));
  for (int t = 0; t <= steps; ++t) grid.values.push_back(lo * std::pow(grid.ratio, t));
  grid.values.back() = std::max(grid.values.back(), hi);
  return grid;
}

GuessGrid build_guess_grid(const MetricInstance& inst, const OutlierBudgets& budgets,
                           double eps_guess) {
  const int served = inst.num_clients() - budgets.total();
  if (served <= 0) throw InputError("guess grid needs n > l");
  double d_min = kInf;
  double d_max = 0.0;
  for (int j = 0; j < inst.num_clients(); ++j) {
    for (int i = 0; i < inst.num_facilities(); ++i) {
      const double d = inst.distance(i, j);
      if (d > 0.0) d_min = std::min(d_min, d);
      d_max = std::max(d_max, d);
    }
  }
  if (d_max == 0.0) return build_guess_grid(0.0, 0.0, eps_guess);
  return build_guess_grid(served * d_min, served * d_max, eps_guess);
}

int select_candidate(const std::vector<RlsCandidate>& candidates) {
  int best = -1;
  for (int c = 0; c < static_cast<int>(candidates.size()); ++c) {
    const auto& cand = candidates[c];
    if (cand.violation <= 1.0 &&
        (best < 0 || cand.service_cost < candidates[best].service_cost)) {
      best = c;
    }
  }
  if (best >= 0) return best;
  for (int c = 0; c < static_cast<int>(candidates.size()); ++c) {
    const auto& cand = candidates[c];
    if (best < 0 || cand.violation < candidates[best].violation ||
        (cand.violation == candidates[best].violation &&
         cand.service_cost < candidates[best].service_cost)) {
      best = c;
    }
  }
  return best;
}

namespace {

// Penalty reduction over an arbitrary client grouping; outliers in the
// returned solutions are still reported under the instance's own groups.
RlsReport run_rls(const MetricInstance& inst, const std::vector<int>& group,
                  const std::vector<int>& budget, const KMedianConfig& cfg) {
  check_k(inst, cfg.k);
  if (!(cfg.gamma > 0.0)) throw InputError("gamma must be positive");
  const int n = inst.num_clients();
  const int groups = static_cast<int>(budget.size());
  const int total = std::accumulate(budget.begin(), budget.end(), 0);

  // Budgets are checked against the relabelled grouping.
  std::vector<int> sizes(groups, 0);
  for (int g : group) ++sizes[g];
  for (int g = 0; g < groups; ++g) {
    if (budget[g] < 0 || budget[g] > sizes[g]) throw InputError("budget outside [0, |C_g|]");
  }
  const GuessGrid grid = build_guess_grid(inst, OutlierBudgets{{total}}, cfg.eps_guess);

  RlsReport report;
  report.candidates.resize(grid.values.size());
  auto evaluate = [&](std::size_t t) {
    PenaltyInstance pinst{inst, cfg.k, std::vector<double>(n)};
    for (int j = 0; j < n; ++j) {
      const int l = budget[group[j]];
      pinst.penalty[j] = l == 0 ? kInf : grid.values[t] / (cfg.gamma * l);
    }
    LocalSearchStats stats;
    const PenaltySolution ps = local_search_penalties(pinst, cfg.improve_frac, &stats);
    RlsCandidate& cand = report.candidates[t];
    cand.guess = grid.values[t];
    cand.swaps = stats.swaps;
    cand.solution = make_solution(inst, ps.open, ps.paying);
    cand.service_cost = cand.solution.connection_cost;
    std::vector<int> used(groups, 0);
    for (int j = 0; j < n; ++j) used[group[j]] += ps.paying[j];
    cand.violation = 0.0;
    for (int g = 0; g < groups; ++g) {
      if (used[g] == 0) continue;
      const double allowed = (groups + cfg.gamma) * budget[g];
      cand.violation = std::max(cand.violation, budget[g] == 0 ? kInf : used[g] / allowed);
    }
  };

  const std::size_t count = grid.values.size();
  const int threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(count)));
  if (threads == 1) {
    for (std::size_t t = 0; t < count; ++t) evaluate(t);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t t = w; t < count; t += threads) evaluate(t);
      });
    }
    for (auto& th : pool) th.join();
  }

  report.winner = select_candidate(report.candidates);
  report.solution = report.candidates[report.winner].solution;
  return report;
}

}  // namespace

RlsReport r_ls_f_report(const MetricInstance& inst, const OutlierBudgets& budgets,
                        const KMedianConfig& cfg) {
  validate_budgets(inst, budgets);
  std::vector<int> group(inst.num_clients());
  for (int j = 0; j < inst.num_clients(); ++j) group[j] = inst.client(j).group;
  return run_rls(inst, group, budgets.per_group, cfg);
}

IntegralSolution r_ls_f(const MetricInstance& inst, const OutlierBudgets& budgets,
                        const KMedianConfig& cfg) {
  return r_ls_f_report(inst, budgets, cfg).solution;
}

RlsReport r_ls_nf_report(const MetricInstance& inst, int total_budget, const KMedianConfig& cfg) {
  if (total_budget < 0 || total_budget > inst.num_clients()) {
    throw InputError("total outlier budget outside [0, n]");
  }
  return run_rls(inst, std::vector<int>(inst.num_clients(), 0), {total_budget}, cfg);
}

IntegralSolution r_ls_nf(const MetricInstance& inst, int total_budget, const KMedianConfig& cfg) {
  return r_ls_nf_report(inst, total_budget, cfg).solution;
}

IntegralSolution ls_nf(const MetricInstance& inst, int total_budget, int k, double improve_frac) {
  const int n = inst.num_clients();
  if (total_budget < 0 || total_budget > n) {
    throw InputError("total outlier budget outside [0, n]");
  }
  PenaltyInstance pinst{inst, k, std::vector<double>(n, kInf)};
  const PenaltySolution ps = local_search_penalties(pinst, improve_frac);
  std::vector<double> dist(n);
  for (int j = 0; j < n; ++j) dist[j] = inst.distance(ps.assignment[j], j);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dist[a] > dist[b]; });
  std::vector<char> dropped(n, 0);
  for (int t = 0; t < total_budget; ++t) dropped[order[t]] = 1;
  return make_solution(inst, ps.open, dropped);
}

}  // namespace fairloc
