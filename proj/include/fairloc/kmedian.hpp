#pragma once

#include <vector>

#include "fairloc/metric.hpp"

namespace fairloc {

// k-median where client j may pay penalty p_j instead of being served.
// Opening costs of `base` are ignored.
struct PenaltyInstance {
  MetricInstance base;
  int k = 1;
  std::vector<double> penalty;  // +inf means the client must be served
};

struct PenaltySolution {
  std::vector<int> open;        // ascending
  std::vector<char> paying;     // per client
  std::vector<int> assignment;  // nearest open facility, -1 for paying clients
  double service_cost = 0.0;
  double penalty_paid = 0.0;
  double total() const { return service_cost + penalty_paid; }
};

// Canonical solution for a fixed open set: a client pays iff p_j < d(j, F).
PenaltySolution evaluate_penalty_solution(const PenaltyInstance& pinst, std::vector<int> open);

struct LocalSearchStats {
  int swaps = 0;
  long evaluations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
};

// Single-swap local search from the first k facilities. Swaps are scanned in
// lexicographic (out, in) order and the first one lowering the cost by at
// least improve_frac of the current cost is taken; the scan then restarts.
PenaltySolution local_search_penalties(const PenaltyInstance& pinst, double improve_frac = 0.01,
                                       LocalSearchStats* stats = nullptr);

// p_j = guess / (gamma * l_g(j)); +inf for groups with l_g = 0.
PenaltyInstance make_penalties(const MetricInstance& inst, const OutlierBudgets& budgets,
                               double guess, double gamma, int k);

struct GuessGrid {
  double lo = 0.0;
  double hi = 0.0;
  double ratio = 1.0;
  std::vector<double> values;
};

// lo * ratio^t for t = 0..T, T the smallest exponent reaching hi.
GuessGrid build_guess_grid(double lo, double hi, double eps_guess);
// Range [(n - l) d_min, (n - l) d_max], d_min the smallest positive
// facility-client distance and l = budgets.total().
GuessGrid build_guess_grid(const MetricInstance& inst, const OutlierBudgets& budgets,
                           double eps_guess);

struct KMedianConfig {
  int k = 5;
  double gamma = 0.5;
  double eps_guess = 0.5;
  double improve_frac = 0.01;
  // Grid points evaluated concurrently.
  int threads = 1;
};

struct RlsCandidate {
  double guess = 0.0;
  IntegralSolution solution;
  double service_cost = 0.0;
  // max_g l'_g / ((omega + gamma) l_g).
  double violation = 0.0;
  int swaps = 0;
};

struct RlsReport {
  IntegralSolution solution;
  std::vector<RlsCandidate> candidates;
  int winner = -1;
};

// Index of the winning candidate: least service cost among those with
// violation <= 1, otherwise least violation with cost as tie-break. Earlier
// candidates win exact ties.
int select_candidate(const std::vector<RlsCandidate>& candidates);

// Penalty reduction with local search for k-median with fair outliers.
RlsReport r_ls_f_report(const MetricInstance& inst, const OutlierBudgets& budgets,
                        const KMedianConfig& cfg = {});
IntegralSolution r_ls_f(const MetricInstance& inst, const OutlierBudgets& budgets,
                        const KMedianConfig& cfg = {});

// Same pipeline with every client in one group of budget total_budget.
RlsReport r_ls_nf_report(const MetricInstance& inst, int total_budget,
                         const KMedianConfig& cfg = {});
IntegralSolution r_ls_nf(const MetricInstance& inst, int total_budget,
                         const KMedianConfig& cfg = {});

// Plain k-median local search, then the total_budget farthest clients are
// dropped (ties: lower client index is dropped first).
IntegralSolution ls_nf(const MetricInstance& inst, int total_budget, int k,
                       double improve_frac = 0.01);

}  // namespace fairloc
