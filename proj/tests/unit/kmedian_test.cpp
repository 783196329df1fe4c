#include <cmath>
#include <limits>
#include <random>

#include "brute_force.hpp"
#include "doctest.h"
#include "fairloc/error.hpp"
#include "fairloc//kmedian.hpp"
#include "fairloc/oracle.hpp"
#include "generators.hpp"

using namespace fairloc;
using fairloc::testing::line_instance;
using fairloc::testing::random_budgets;
using fairloc::testing::random_instance;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Two clusters on a line, `a` clients near 0 (group 0) and `b` near 100
// (group 1); facilities at both cluster centres and in between.
MetricInstance two_clusters(int a, int b) {
  std::vector<double> xs;
  std::vector<int> groups;
  for (int j = 0; j < a; ++j) {
    xs.push_back(0.1 * (j % 5));
    groups.push_back(0);
  }
  for (int j = 0; j < b; ++j) {
    xs.push_back(100.0 + 0.1 * (j % 5));
    groups.push_back(1);
  }
  return line_instance(xs, {50.0, 0.2, 100.2, 30.0}, {}, groups);
}

}  // namespace

TEST_SUITE("kmedian") {
  TEST_CASE("one median of three collinear points") {
    auto inst = line_instance({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0}, {});
    PenaltyInstance pinst{inst, 1, {kInf, kInf, kInf}};
    auto sol = local_search_penalties(pinst);
    CHECK(sol.open == std::vector<int>{1});
    CHECK(sol.total() == doctest::Approx(2.0));
  }

  TEST_CASE("zero penalty client always pays") {
    auto inst = line_instance({3.0}, {0.0, 1.0}, {});
    PenaltyInstance pinst{inst, 1, {0.0}};
    auto sol = local_search_penalties(pinst);
    CHECK(sol.paying[0] == 1);
    CHECK(sol.total() == 0.0);
  }

  TEST_CASE("two clusters get one facility each") {
    auto inst = two_clusters(6, 6);
    PenaltyInstance pinst{inst, 2, std::vector<double>(12, 1000.0)};
    auto sol = local_search_penalties(pinst);
    CHECK(sol.open == std::vector<int>{1, 2});
    CHECK(sol.total() == doctest::Approx(exact_kmp(pinst).total()));
  }

  TEST_CASE("penalty ties resolve to serving") {
    auto inst = line_instance({2.0}, {0.0}, {});
    PenaltyInstance pinst{inst, 1, {2.0}};
    auto sol = evaluate_penalty_solution(pinst, {0});
    CHECK(sol.paying[0] == 0);
    CHECK(sol.assignment[0] == 0);
  }

  TEST_CASE("penalties from a cost guess") {
    auto inst = line_instance({0.0, 1.0, 2.0}, {0.0}, {}, {0, 1, 1});
    auto a = make_penalties(inst, {{4, 2}}, 100.0, 0.5, 1);
    CHECK(a.penalty[0] == doctest::Approx(50.0));
    auto b = make_penalties(inst, {{2, 5}}, 100.0, 1.0, 1);
    CHECK(b.penalty[0] == doctest::Approx(50.0));
    CHECK(b.penalty[1] == doctest::Approx(20.0));
    auto c = make_penalties(inst, {{0, 1}}, 100.0, 1.0, 1);
    CHECK(std::isinf(c.penalty[0]));
    CHECK_THROWS_AS(make_penalties(inst, {{1, 1}}, 100.0, 0.0, 1), InputError);
  }

  TEST_CASE("guess grid examples") {
    auto grid = build_guess_grid(8.0, 32.0, 0.5);
    REQUIRE(grid.values.size() == 5);
    const double expected[] = {8.0, 12.0, 18.0, 27.0, 40.5};
    for (int t = 0; t < 5; ++t) CHECK(grid.values[t] == doctest::Approx(expected[t]));

    // n = 10, l = 2, distances 1..4 from a single facility.
    auto inst = line_instance({1.0, 4.0, 2.0, 2.5, 3.0, 1.5, 3.5, 2.2, 1.1, 3.9}, {0.0}, {});
    auto from_inst = build_guess_grid(inst, {{2}}, 0.5);
    CHECK(from_inst.lo == doctest::Approx(8.0));
    CHECK(from_inst.hi == doctest::Approx(32.0));
    CHECK(from_inst.values.size() == 5);

    CHECK(build_guess_grid(3.0, 3.0, 0.5).values == std::vector<double>{3.0});
    auto tight = build_guess_grid(line_instance({1.0, 4.0}, {0.0}, {}), {{1}}, 0.5);
    CHECK(tight.lo == doctest::Approx(1.0));
    CHECK(tight.hi == doctest::Approx(4.0));
    auto zero = build_guess_grid(line_instance({0.0, 0.0}, {0.0}, {}), {{0}}, 0.5);
    CHECK(zero.values == std::vector<double>{0.0});
    CHECK_THROWS_AS(build_guess_grid(line_instance({1.0}, {0.0}, {}), {{1}}, 0.5), InputError);
  }

  TEST_CASE("guess grid brackets its range") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(1e-3, 1e3);
    std::uniform_real_distribution<double> e(0.01, 2.0);
    for (int trial = 0; trial < 500; ++trial) {
      double lo = u(rng), hi = u(rng);
      if (lo > hi) std::swap(lo, hi);
      const double eps = e(rng);
      auto grid = build_guess_grid(lo, hi, eps);
      const auto bound = std::ceil(std::log(hi / lo) / std::log(1 + eps)) + 1;
      CHECK(grid.values.size() <= bound);
      CHECK(grid.values.front() == lo);
      CHECK(grid.values.back() >= hi);
      if (grid.values.size() > 1) CHECK(grid.values[grid.values.size() - 2] < hi);
    }
  }

  TEST_CASE("local search contract on random instances") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 60; ++trial) {
      auto inst = random_instance(rng, {.clients = 4 + trial % 9, .facilities = 2 + trial % 5});
      std::uniform_int_distribution<int> pick_k(1, inst.num_facilities());
      std::uniform_real_distribution<double> pen(0.0, 15.0);
      const int k = pick_k(rng);
      std::vector<double> p(inst.num_clients());
      for (double& v : p) v = trial % 3 == 0 ? kInf : pen(rng);
      PenaltyInstance pinst{inst, k, p};
      LocalSearchStats stats;
      auto sol = local_search_penalties(pinst, 0.01, &stats);

      CHECK(static_cast<int>(sol.open.size()) <= k);
      double naive = 0.0;
      for (int j = 0; j < inst.num_clients(); ++j) {
        double d = kInf;
        for (int i : sol.open) d = std::min(d, inst.distance(i, j));
        naive += std::min(d, p[j]);
        CHECK((sol.paying[j] != 0) == (p[j] < d));
      }
      CHECK(sol.total() == doctest::Approx(naive));
      CHECK(sol.total() == doctest::Approx(stats.final_cost));

      const double oracle = fairloc::testing::brute_force_kmp(inst, p, k);
      CHECK(sol.total() >= oracle - 1e-9);
      CHECK(exact_kmp(pinst).total() == doctest::Approx(oracle));
      if (stats.final_cost > 0.0) {
        const double bound = std::log(stats.initial_cost / stats.final_cost) / -std::log(0.99);
        CHECK(stats.swaps <= bound + 1e-9);
      }
    }
  }

  TEST_CASE("selection rule") {
    auto cand = [](double cost, double violation) {
      RlsCandidate c;
      c.service_cost = cost;
      c.violation = violation;
      return c;
    };
    CHECK(select_candidate({cand(5, 0.5), cand(3, 1.2), cand(4, 1.0)}) == 2);
    CHECK(select_candidate({cand(5, 2.0), cand(3, 1.5), cand(4, 1.5)}) == 1);
    CHECK(select_candidate({cand(5, 0.0), cand(5, 0.0)}) == 0);
  }

  TEST_CASE("fair reduction on one tight cluster") {
    std::vector<double> xs = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 9.0, 9.5};
    auto inst = line_instance(xs, {0.25, 4.0, 9.2}, {}, {0, 0, 0, 1, 1, 1, 0, 1});
    OutlierBudgets budgets{{1, 1}};
    KMedianConfig cfg;
    cfg.k = 1;
    auto report = r_ls_f_report(inst, budgets, cfg);
    auto sol = report.solution;
    const auto counts = sol.outlier_counts();
    CHECK(counts[0] <= 1);
    CHECK(counts[1] <= 1);
    auto exact = exact_kmfo(inst, budgets, 1);
    CHECK(sol.connection_cost == doctest::Approx(exact.connection_cost));
  }

  TEST_CASE("winner follows the documented rule") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
      auto inst = random_instance(rng, {.clients = 10, .facilities = 4, .groups = 2});
      auto budgets = random_budgets(rng, inst);
      if (budgets.total() >= inst.num_clients()) budgets.per_group[0] = 0;
      KMedianConfig cfg;
      cfg.k = 2;
      auto report = r_ls_f_report(inst, budgets, cfg);
      const auto& cands = report.candidates;
      // Recompute the violation of each candidate from its outliers.
      for (const auto& c : cands) {
        double v = 0.0;
        const auto counts = c.solution.outlier_counts();
        for (int g = 0; g < 2; ++g) {
          if (counts[g] == 0) continue;
          v = std::max(v, budgets.per_group[g] == 0
                              ? kInf
                              : counts[g] / ((2 + cfg.gamma) * budgets.per_group[g]));
        }
        CHECK(c.violation == doctest::Approx(v));
      }
      bool any_ok = false;
      for (const auto& c : cands) any_ok = any_ok || c.violation <= 1.0;
      const auto& w = cands[report.winner];
      for (const auto& c : cands) {
        if (any_ok) {
          CHECK(w.violation <= 1.0);
          if (c.violation <= 1.0) CHECK(w.service_cost <= c.service_cost);
        } else {
          CHECK(w.violation <= c.violation);
        }
      }
    }
  }

  TEST_CASE("one group equals the non-fair reduction") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 15; ++trial) {
      auto inst = random_instance(rng, {.clients = 12, .facilities = 5, .groups = 1});
      std::uniform_int_distribution<int> pick(1, 5);
      const int l = pick(rng);
      KMedianConfig cfg;
      cfg.k = 2;
      auto a = r_ls_f(inst, {{l}}, cfg);
      auto b = r_ls_nf(inst, l, cfg);
      CHECK(a.open == b.open);
      CHECK(a.outliers == b.outliers);
      CHECK(a.connection_cost == b.connection_cost);
    }
  }

  TEST_CASE("grid points can run concurrently") {
    std::mt19937_64 rng(47);
    auto inst = random_instance(rng, {.clients = 40, .facilities = 8, .groups = 2});
    OutlierBudgets budgets{{3, 3}};
    KMedianConfig serial;
    serial.k = 3;
    KMedianConfig parallel = serial;
    parallel.threads = 4;
    auto a = r_ls_f(inst, budgets, serial);
    auto b = r_ls_f(inst, budgets, parallel);
    CHECK(a.open == b.open);
    CHECK(a.outliers == b.outliers);
  }

  TEST_CASE("local search then drop the farthest") {
    SUBCASE("no budget is plain local search") {
      auto inst = line_instance({0.0, 1.0, 2.0, 7.0}, {0.0, 1.0, 7.0}, {});
      auto sol = ls_nf(inst, 0, 1);
      PenaltyInstance pinst{inst, 1, std::vector<double>(4, kInf)};
      CHECK(sol.open == local_search_penalties(pinst).open);
      CHECK(sol.num_outliers() == 0);
    }
    SUBCASE("co-located clients drop lowest indices") {
      auto inst = line_instance({1.0, 1.0, 1.0, 1.0}, {0.0}, {});
      auto sol = ls_nf(inst, 2, 1);
      CHECK(sol.outliers[0] == std::vector<int>{0, 1});
    }
    SUBCASE("minority cluster is dropped entirely") {
      auto inst = two_clusters(30, 10);
      auto sol = ls_nf(inst, 10, 1);
      CHECK(sol.outliers[1].size() == 10);
      CHECK(sol.outliers[0].empty());
      CHECK(unfairness(OutlierBudgets{{8, 2}}, sol) == doctest::Approx(5.0));
    }
  }
}
