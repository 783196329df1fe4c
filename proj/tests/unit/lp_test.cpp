#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fairloc/lp.hpp"
#include "generators.hpp"
#include "lp_oracle.hpp"

using namespace fairloc;
using fairloc::testing::line_instance;
using fairloc::testing::random_budgets;
using fairloc::testing::random_instance;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_SUITE("lp") {
  TEST_CASE("model dimensions") {
    auto one = line_instance({1.0}, {0.0}, {1.0});
    auto m1 = build_flfo_lp(one, {{0}}, BudgetMode::kPerGroup);
    CHECK(m1.num_variables() == 3);
    CHECK(m1.num_rows() == 3);

    auto inst = line_instance({0.0, 1.0, 2.0}, {0.0, 2.0}, {1.0, 1.0}, {0, 1, 1});
    auto fair = build_flfo_lp(inst, {{1, 1}}, BudgetMode::kPerGroup);
    CHECK(fair.num_variables() == 11);
    CHECK(fair.num_rows() == 11);
    auto aggregate = build_flfo_lp(inst, {{1, 1}}, BudgetMode::kAggregate);
    CHECK(aggregate.num_rows() == 10);

    CHECK_THROWS_AS(build_flfo_lp(inst, {{1}}, BudgetMode::kPerGroup), InputError);
  }

  TEST_CASE("generic simplex on textbook programs") {
    SUBCASE("bounded optimum") {
      // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18.
      LpModel model;
      int x = model.add_variable(-3.0, 0.0, kInf);
      int y = model.add_variable(-5.0, 0.0, kInf);
      model.add_row(RowSense::kLessEqual, 4.0, {{x, 1.0}});
      model.add_row(RowSense::kLessEqual, 12.0, {{y, 2.0}});
      model.add_row(RowSense::kLessEqual, 18.0, {{x, 3.0}, {y, 2.0}});
      auto r = solve_simplex(model);
      REQUIRE(r.status == LpStatus::kOptimal);
      CHECK(r.objective == doctest::Approx(-36.0));
      CHECK(r.values[x] == doctest::Approx(2.0));
      CHECK(r.values[y] == doctest::Approx(6.0));
    }
    SUBCASE("needs phase one") {
      LpModel model;
      int x = model.add_variable(1.0, 0.0, 10.0);
      int y = model.add_variable(2.0, 0.0, 10.0);
      model.add_row(RowSense::kGreaterEqual, 3.0, {{x, 1.0}, {y, 1.0}});
      model.add_row(RowSense::kGreaterEqual, 1.0, {{y, 1.0}});
      auto r = solve_simplex(model);
      REQUIRE(r.status == LpStatus::kOptimal);
      CHECK(r.objective == doctest::Approx(4.0));
    }
    SUBCASE("infeasible") {
      LpModel model;
      int x = model.add_variable(1.0, 0.0, 1.0);
      model.add_row(RowSense::kGreaterEqual, 2.0, {{x, 1.0}});
      CHECK(solve_simplex(model).status == LpStatus::kInfeasible);
      CHECK_THROWS_AS(solve_lp(model), LpError);
    }
    SUBCASE("unbounded") {
      LpModel model;
      int x = model.add_variable(-1.0, 0.0, kInf);
      model.add_row(RowSense::kGreaterEqual, 1.0, {{x, 1.0}});
      CHECK(solve_simplex(model).status == LpStatus::kUnbounded);
    }
  }

  TEST_CASE("single client programs") {
    auto free_facility = line_instance({7.0}, {0.0}, {0.0});
    auto sol = solve_lp(build_flfo_lp(free_facility, {{0}}, BudgetMode::kPerGroup));
    CHECK(sol.objective_value == doctest::Approx(7.0));
    CHECK(sol.y[0] == doctest::Approx(1.0));
    CHECK(sol.value(0, 0) == doctest::Approx(1.0));
    CHECK(sol.z[0] == doctest::Approx(0.0));

    auto costly = line_instance({10.0}, {0.0}, {3.0});
    auto sol2 = solve_lp(build_flfo_lp(costly, {{1}}, BudgetMode::kPerGroup));
    CHECK(sol2.objective_value == doctest::Approx(0.0));
    CHECK(sol2.z[0] == doctest::Approx(1.0));
  }

  TEST_CASE("integrality gap family") {
    for (auto [f, M] : {std::pair{100.0, 100}, {10.0, 2}, {1.0, 1000}, {37.5, 9}}) {
      auto gap = build_gap_instance(f, M);
      auto sol = solve_flfo_lp(gap.instance, gap.budgets, BudgetMode::kPerGroup).solution;
      CHECK(relative_gap(sol.objective_value, f / M) <= 1e-6);
    }
    auto gap = build_gap_instance(100.0, 100);
    auto sol = solve_lp(build_flfo_lp(gap.instance, gap.budgets, BudgetMode::kPerGroup));
    CHECK(sol.objective_value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sol.y[0] == doctest::Approx(0.01));
    CHECK_THROWS_AS(build_gap_instance(1.0, 1), InputError);
    CHECK_THROWS_AS(build_gap_instance(0.0, 5), InputError);
  }

  TEST_CASE("matches vertex enumeration on tiny instances") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 12; ++trial) {
      auto inst = random_instance(rng, {.clients = 2, .facilities = 2, .groups = 1 + trial % 2});
      auto budgets = random_budgets(rng, inst);
      for (auto mode : {BudgetMode::kPerGroup, BudgetMode::kAggregate}) {
        auto model = build_flfo_lp(inst, budgets, mode);
        auto expected = fairloc::testing::vertex_enumeration_optimum(model);
        REQUIRE(expected.has_value());
        auto r = solve_simplex(model);
        REQUIRE(r.status == LpStatus::kOptimal);
        CHECK(r.objective == doctest::Approx(*expected).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("solutions satisfy every row and are deterministic") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 40; ++trial) {
      auto inst = random_instance(
          rng, {.clients = 5 + trial % 20, .facilities = 2 + trial % 6, .groups = 1 + trial % 3});
      auto budgets = random_budgets(rng, inst);
      auto mode = trial % 2 ? BudgetMode::kAggregate : BudgetMode::kPerGroup;
      auto model = build_flfo_lp(inst, budgets, mode);
      auto a = solve_simplex(model);
      auto b = solve_simplex(model);
      REQUIRE(a.status == LpStatus::kOptimal);
      CHECK(max_constraint_violation(model, a.values) <= 1e-7);
      CHECK(a.objective == b.objective);
      CHECK(a.values == b.values);
      auto frac = extract_fractional(model, a.values, inst.num_clients(), inst.num_facilities());
      CHECK(flfo_violation(inst, budgets, mode, frac) <= 1e-7);
      CHECK(fractional_cost(inst, frac) == doctest::Approx(a.objective));
    }
  }

  TEST_CASE("pair pricing reaches the full-model optimum") {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 30; ++trial) {
      auto inst = random_instance(
          rng, {.clients = 10 + trial, .facilities = 3 + trial % 8, .groups = 1 + trial % 3});
      if (trial % 3 == 0) inst = prune_pairs(inst);
      auto budgets = random_budgets(rng, inst);
      auto mode = trial % 2 ? BudgetMode::kAggregate : BudgetMode::kPerGroup;
      const double full = solve_lp(build_flfo_lp(inst, budgets, mode)).objective_value;
      FlfoLpOptions options;
      options.initial_pairs_per_client = 1;
      auto priced = solve_flfo_lp(inst, budgets, mode, options);
      CHECK(relative_gap(priced.solution.objective_value, full) <= 1e-6);
      CHECK(flfo_violation(inst, budgets, mode, priced.solution) <= 1e-7);
      CHECK(priced.pairs_used <= inst.num_allowed_pairs());
    }
  }

  TEST_CASE("pivot cap reports an iteration limit") {
    std::mt19937_64 rng(2);
    auto inst = random_instance(rng, {.clients = 30, .facilities = 6});
    auto model = build_flfo_lp(inst, {{3, 3}}, BudgetMode::kPerGroup);
    SimplexOptions options;
    options.max_pivots = 2;
    CHECK(solve_simplex(model, options).status == LpStatus::kIterationLimit);
  }

  TEST_CASE("MPS dump uses fixed-format fields") {
    auto inst = line_instance({1.5}, {0.0}, {2.0});
    auto model = build_flfo_lp(inst, {{0}}, BudgetMode::kPerGroup);
    std::ostringstream out;
    write_mps(model, out);
    const std::string text = out.str();
    CHECK(text.rfind("NAME          FLFO\n", 0) == 0);
    CHECK(text.find("ROWS\n N  COST\n G  R0000000\n L  R0000001\n") != std::string::npos);
    CHECK(text.find("    C0000000  COST      1.5\n") != std::string::npos);
    CHECK(text.find("    C0000000  R0000000  1\n") != std::string::npos);
    CHECK(text.find("    RHS       R0000000  1\n") != std::string::npos);
    CHECK(text.find(" UP BND       C0000002  1\n") != std::string::npos);
    CHECK(text.size() > 0);
    CHECK(text.substr(text.size() - 7) == "ENDATA\n");
  }
}
