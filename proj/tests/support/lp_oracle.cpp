#include "lp_oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

namespace fairloc::testing {

namespace {

struct Hyperplane {
  Eigen::VectorXd normal;
  double offset;
};

}  // namespace

std::optional<double> vertex_enumeration_optimum(const LpModel& model) {
  const int n = model.num_variables();
  std::vector<Hyperplane> planes;
  for (int r = 0; r < model.num_rows(); ++r) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (int v = 0; v < n; ++v) {
      for (const LpEntry& e : model.column(v)) {
        if (e.row == r) a[v] += e.value;
      }
    }
    planes.push_back({a, model.rhs(r)});
  }
  for (int v = 0; v < n; ++v) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(n, v);
    if (std::isfinite(model.lower(v))) planes.push_back({e, model.lower(v)});
    if (std::isfinite(model.upper(v))) planes.push_back({e, model.upper(v)});
  }
  const int k = static_cast<int>(planes.size());
  std::optional<double> best;
  std::vector<int> pick(n);
  for (int i = 0; i < n; ++i) pick[i] = i;
  if (n > k) return best;
  for (;;) {
    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
      a.row(i) = planes[pick[i]].normal.transpose();
      b[i] = planes[pick[i]].offset;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rank() == n) {
      const Eigen::VectorXd x = lu.solve(b);
      if (model.num_variables() == n &&
          max_constraint_violation(model, std::span<const double>(x.data(), n)) <= 1e-9) {
        double obj = 0.0;
        for (int v = 0; v < n; ++v) obj += model.cost(v) * x[v];
        if (!best || obj < *best) best = obj;
      }
    }
    int i = n - 1;
    while (i >= 0 && pick[i] == k - n + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int t = i + 1; t < n; ++t) pick[t] = pick[t - 1] + 1;
  }
  return best;
}

}  // namespace fairloc::testing
