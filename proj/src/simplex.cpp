#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fairloc/lp.hpp"

namespace fairloc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTolerance = 1e-9;
constexpr double kDegenerateStep = 1e-12;

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Vector = Eigen::VectorXd;

// Product-form update: B_new^{-1} = E * B_old^{-1}, E differing from the
// identity in column `row` only.
struct Eta {
  int row = 0;
  double pivot = 1.0;
  std::vector<int> index;
  std::vector<double> value;
};

class BasisFactor {
 public:
  bool factor(const SparseMatrix& basis) {
    etas_.clear();
    lu_.analyzePattern(basis);
    lu_.factorize(basis);
    return lu_.info() == Eigen::Success;
  }

  void ftran(Vector& v) {
    v = lu_.solve(v).eval();
    for (const Eta& eta : etas_) {
      const double pivot_value = v[eta.row] / eta.pivot;
      if (pivot_value != 0.0) {
        for (std::size_t k = 0; k < eta.index.size(); ++k) {
          v[eta.index[k]] -= eta.value[k] * pivot_value;
        }
      }
      v[eta.row] = pivot_value;
    }
  }

  void btran(Vector& v) {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double acc = v[it->row];
      for (std::size_t k = 0; k < it->index.size(); ++k) {
        acc -= it->value[k] * v[it->index[k]];
      }
      v[it->row] = acc / it->pivot;
    }
    v = lu_.transpose().solve(v).eval();
  }

  // alpha = B^{-1} a_q for the entering column, pivoting on `row`.
  void update(int row, const Vector& alpha) {
    Eta eta;
    eta.row = row;
    eta.pivot = alpha[row];
    for (int i = 0; i < alpha.size(); ++i) {
      if (i != row && alpha[i] != 0.0) {
        eta.index.push_back(i);
        eta.value.push_back(alpha[i]);
      }
    }
    etas_.push_back(std::move(eta));
  }

  std::size_t num_updates() const { return etas_.size(); }

 private:
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
};

class Simplex {
 public:
  Simplex(const LpModel& model, const SimplexOptions& options)
      : model_(model), options_(options) {
    rows_ = model.num_rows();
    structurals_ = model.num_variables();
    max_iterations_ = options.max_pivots > 0
                          ? options.max_pivots
                          : 50L * (static_cast<long>(rows_) + structurals_);
    col_start_.push_back(0);
    for (int v = 0; v < structurals_; ++v) {
      for (const LpEntry& e : model.column(v)) {
        row_index_.push_back(e.row);
        col_value_.push_back(e.value);
      }
      col_start_.push_back(static_cast<int>(row_index_.size()));
      cost_.push_back(model.cost(v));
      lower_.push_back(model.lower(v));
      upper_.push_back(model.upper(v));
    }
    for (int r = 0; r < rows_; ++r) {
      row_index_.push_back(r);
      col_value_.push_back(-1.0);
      col_start_.push_back(static_cast<int>(row_index_.size()));
      cost_.push_back(0.0);
      if (model.sense(r) == RowSense::kGreaterEqual) {
        lower_.push_back(model.rhs(r));
        upper_.push_back(kInf);
      } else {
        lower_.push_back(-kInf);
        upper_.push_back(model.rhs(r));
      }
    }
  }

  SimplexResult run() {
    SimplexResult result;
    bool warm = false;
    if (options_.warm_start != nullptr) warm = try_warm_start(*options_.warm_start);
    if (!warm) {
      if (!cold_start()) {
        result.status = LpStatus::kNumericalFailure;
        return result;
      }
      if (num_artificials_ > 0) {
        std::vector<double> phase1(total(), 0.0);
        for (int a = first_artificial(); a < total(); ++a) phase1[a] = 1.0;
        const LpStatus s = iterate(phase1);
        if (s != LpStatus::kOptimal) {
          result.status = s == LpStatus::kUnbounded ? LpStatus::kNumericalFailure : s;
          fill_counters(result);
          return result;
        }
        double infeasibility = 0.0;
        for (int a = first_artificial(); a < total(); ++a) infeasibility += x_[a];
        if (infeasibility > options_.primal_tolerance * std::max(1, num_artificials_)) {
          result.status = LpStatus::kInfeasible;
          fill_counters(result);
          return result;
        }
        for (int a = first_artificial(); a < total(); ++a) {
          upper_[a] = 0.0;
          if (status_[a] != VarStatus::kBasic) x_[a] = 0.0;
        }
        drive_out_artificials();
      }
    }
    result.warm_started = warm;
    const LpStatus s = iterate(cost_);
    result.status = s;
    fill_counters(result);
    if (s != LpStatus::kOptimal) return result;

    result.values.assign(structurals_, 0.0);
    result.objective = 0.0;
    for (int v = 0; v < structurals_; ++v) {
      result.values[v] = std::clamp(x_[v], lower_[v], upper_[v]);
      result.objective += cost_[v] * result.values[v];
    }
    result.row_duals.assign(duals_.data(), duals_.data() + rows_);
    bool artificial_basic = false;
    for (int a = first_artificial(); a < total(); ++a) {
      if (status_[a] == VarStatus::kBasic) artificial_basic = true;
    }
    if (!artificial_basic) {
      result.basis.status.assign(status_.begin(), status_.begin() + structurals_ + rows_);
    }
    return result;
  }

 private:
  int total() const { return static_cast<int>(cost_.size()); }
  int first_artificial() const { return structurals_ + rows_; }

  void fill_counters(SimplexResult& r) const {
    r.pivots = pivots_;
    r.bound_flips = flips_;
    r.degenerate_pivots = degenerate_;
  }

  void add_artificial(int row, double sign) {
    row_index_.push_back(row);
    col_value_.push_back(sign);
    col_start_.push_back(static_cast<int>(row_index_.size()));
    cost_.push_back(0.0);
    lower_.push_back(0.0);
    upper_.push_back(kInf);
    ++num_artificials_;
  }

  double nonbasic_value(int v, VarStatus s) const {
    return s == VarStatus::kAtUpper ? upper_[v] : lower_[v];
  }

  bool cold_start() {
    std::vector<double> activity(rows_, 0.0);
    x_.assign(total(), 0.0);
    status_.assign(total(), VarStatus::kAtLower);
    for (int v = 0; v < structurals_; ++v) {
      const bool up = model_.start_at_upper(v) && std::isfinite(upper_[v]);
      if (!std::isfinite(lower_[v]) && !up) {
        if (!std::isfinite(upper_[v])) return false;  // free columns unsupported
        status_[v] = VarStatus::kAtUpper;
      } else {
        status_[v] = up ? VarStatus::kAtUpper : VarStatus::kAtLower;
      }
      x_[v] = nonbasic_value(v, status_[v]);
      if (x_[v] != 0.0) {
        for (int k = col_start_[v]; k < col_start_[v + 1]; ++k) {
          activity[row_index_[k]] += col_value_[k] * x_[v];
        }
      }
    }
    head_.assign(rows_, -1);
    for (int r = 0; r < rows_; ++r) {
      const int s = structurals_ + r;
      if (activity[r] < lower_[s]) {
        status_[s] = VarStatus::kAtLower;
        x_[s] = lower_[s];
        add_artificial(r, 1.0);
      } else if (activity[r] > upper_[s]) {
        status_[s] = VarStatus::kAtUpper;
        x_[s] = upper_[s];
        add_artificial(r, -1.0);
      } else {
        status_[s] = VarStatus::kBasic;
        x_[s] = activity[r];
        head_[r] = s;
      }
    }
    x_.resize(total(), 0.0);
    status_.resize(total(), VarStatus::kBasic);
    for (int a = first_artificial(); a < total(); ++a) {
      const int r = row_index_[col_start_[a]];
      head_[r] = a;
      x_[a] = std::abs(x_[structurals_ + r] - activity[r]);
    }
    rebuild_positions();
    return refactor();
  }

  bool try_warm_start(const Basis& basis) {
    if (static_cast<int>(basis.status.size()) != structurals_ + rows_) return false;
    status_ = basis.status;
    x_.assign(total(), 0.0);
    head_.clear();
    for (int v = 0; v < total(); ++v) {
      if (status_[v] == VarStatus::kBasic) {
        head_.push_back(v);
        continue;
      }
      const double value = nonbasic_value(v, status_[v]);
      if (!std::isfinite(value)) return false;
      x_[v] = value;
    }
    if (static_cast<int>(head_.size()) != rows_) return false;
    rebuild_positions();
    if (!refactor()) return false;
    for (int r = 0; r < rows_; ++r) {
      const int b = head_[r];
      if (x_[b] < lower_[b] - options_.primal_tolerance ||
          x_[b] > upper_[b] + options_.primal_tolerance) {
        return false;
      }
    }
    return true;
  }

  void rebuild_positions() {
    position_.assign(total(), -1);
    for (int r = 0; r < rows_; ++r) position_[head_[r]] = r;
  }

  // Refactors the basis and recomputes basic values from the nonbasic ones.
  bool refactor() {
    std::vector<Eigen::Triplet<double, int>> triplets;
    for (int r = 0; r < rows_; ++r) {
      const int b = head_[r];
      for (int k = col_start_[b]; k < col_start_[b + 1]; ++k) {
        triplets.emplace_back(row_index_[k], r, col_value_[k]);
      }
    }
    SparseMatrix basis(rows_, rows_);
    basis.setFromTriplets(triplets.begin(), triplets.end());
    basis.makeCompressed();
    if (!factor_.factor(basis)) return false;

    Vector rhs = Vector::Zero(rows_);
    for (int v = 0; v < total(); ++v) {
      if (status_[v] == VarStatus::kBasic || x_[v] == 0.0) continue;
      for (int k = col_start_[v]; k < col_start_[v + 1]; ++k) {
        rhs[row_index_[k]] -= col_value_[k] * x_[v];
      }
    }
    factor_.ftran(rhs);
    for (int r = 0; r < rows_; ++r) x_[head_[r]] = rhs[r];
    return true;
  }

  double reduced_cost(const std::vector<double>& cost, int v) const {
    double d = cost[v];
    for (int k = col_start_[v]; k < col_start_[v + 1]; ++k) {
      d -= duals_[row_index_[k]] * col_value_[k];
    }
    return d;
  }

  void compute_duals(const std::vector<double>& cost) {
    duals_.resize(rows_);
    for (int r = 0; r < rows_; ++r) duals_[r] = cost[head_[r]];
    factor_.btran(duals_);
  }

  // Returns the entering variable, or -1 at optimality.
  int price(const std::vector<double>& cost, bool bland) const {
    const double tol = options_.dual_tolerance;
    int best = -1;
    double best_score = 0.0;
    for (int v = 0; v < total(); ++v) {
      const VarStatus s = status_[v];
      if (s == VarStatus::kBasic || lower_[v] == upper_[v]) continue;
      const double d = reduced_cost(cost, v);
      double score = 0.0;
      if (s == VarStatus::kAtLower && d < -tol) score = -d;
      if (s == VarStatus::kAtUpper && d > tol) score = d;
      if (score == 0.0) continue;
      if (bland) return v;
      if (score > best_score) {
        best_score = score;
        best = v;
      }
    }
    return best;
  }

  void load_column(int v, Vector& out) const {
    out.setZero(rows_);
    for (int k = col_start_[v]; k < col_start_[v + 1]; ++k) {
      out[row_index_[k]] += col_value_[k];
    }
  }

  struct Ratio {
    int row = -1;        // leaving position, -1 for a bound flip
    double step = kInf;  // kInf means unbounded
    bool to_upper = false;
  };

  Ratio ratio_test(int q, int dir, const Vector& alpha, bool bland) const {
    const double ptol = options_.primal_tolerance;
    Ratio best;
    const double flip = upper_[q] - lower_[q];

    // Harris pass 1: largest step keeping every basic within relaxed bounds.
    double relaxed = kInf;
    if (!bland) {
      for (int i = 0; i < rows_; ++i) {
        const double a = alpha[i];
        if (std::abs(a) <= kPivotTolerance) continue;
        const int b = head_[i];
        const double rate = -dir * a;
        if (rate < 0.0 && std::isfinite(lower_[b])) {
          relaxed = std::min(relaxed, (x_[b] - lower_[b] + ptol) / -rate);
        } else if (rate > 0.0 && std::isfinite(upper_[b])) {
          relaxed = std::min(relaxed, (upper_[b] + ptol - x_[b]) / rate);
        }
      }
    }

    double best_abs = 0.0;
    double best_step = kInf;
    int best_var = -1;
    for (int i = 0; i < rows_; ++i) {
      const double a = alpha[i];
      if (std::abs(a) <= kPivotTolerance) continue;
      const int b = head_[i];
      const double rate = -dir * a;
      double step;
      bool to_upper;
      if (rate < 0.0) {
        if (!std::isfinite(lower_[b])) continue;
        step = (x_[b] - lower_[b]) / -rate;
        to_upper = false;
      } else {
        if (!std::isfinite(upper_[b])) continue;
        step = (upper_[b] - x_[b]) / rate;
        to_upper = true;
      }
      step = std::max(step, 0.0);
      if (bland) {
        if (step < best_step - kDegenerateStep ||
            (step <= best_step + kDegenerateStep && b < best_var)) {
          best_step = step;
          best_var = b;
          best.row = i;
          best.to_upper = to_upper;
        }
      } else if (step <= relaxed && std::abs(a) > best_abs) {
        best_abs = std::abs(a);
        best_step = step;
        best.row = i;
        best.to_upper = to_upper;
      }
    }
    best.step = best_step;
    if (flip <= best_step) {
      best.row = -1;
      best.step = flip;
    }
    return best;
  }

  LpStatus iterate(const std::vector<double>& cost) {
    Vector alpha(rows_);
    int streak = 0;
    bool verified = false;
    for (;;) {
      if (pivots_ + flips_ >= max_iterations_) return LpStatus::kIterationLimit;
      if (static_cast<int>(factor_.num_updates()) >= options_.refactor_interval) {
        if (!refactor()) return LpStatus::kNumericalFailure;
      }
      compute_duals(cost);
      const bool bland = streak > options_.degeneracy_streak;
      const int q = price(cost, bland);
      if (q < 0) {
        // Confirm optimality on a fresh factorization before stopping.
        if (factor_.num_updates() == 0 || verified) return LpStatus::kOptimal;
        if (!refactor()) return LpStatus::kNumericalFailure;
        verified = true;
        continue;
      }
      verified = false;
      const int dir = status_[q] == VarStatus::kAtLower ? 1 : -1;
      load_column(q, alpha);
      factor_.ftran(alpha);
      const Ratio ratio = ratio_test(q, dir, alpha, bland);
      if (!std::isfinite(ratio.step)) return LpStatus::kUnbounded;

      const double step = ratio.step;
      if (step != 0.0) {
        x_[q] += dir * step;
        for (int i = 0; i < rows_; ++i) {
          if (alpha[i] != 0.0) x_[head_[i]] -= dir * step * alpha[i];
        }
      }
      if (step <= kDegenerateStep) {
        ++streak;
        ++degenerate_;
      } else {
        streak = 0;
      }
      if (ratio.row < 0) {
        status_[q] = dir > 0 ? VarStatus::kAtUpper : VarStatus::kAtLower;
        x_[q] = nonbasic_value(q, status_[q]);
        ++flips_;
        continue;
      }
      const int leaving = head_[ratio.row];
      status_[leaving] = ratio.to_upper ? VarStatus::kAtUpper : VarStatus::kAtLower;
      x_[leaving] = nonbasic_value(leaving, status_[leaving]);
      position_[leaving] = -1;
      head_[ratio.row] = q;
      position_[q] = ratio.row;
      status_[q] = VarStatus::kBasic;
      factor_.update(ratio.row, alpha);
      ++pivots_;
    }
  }

  // Swaps basic artificials (all at zero after phase 1) for structural or
  // logical columns with a usable pivot in their row.
  void drive_out_artificials() {
    Vector rho(rows_);
    Vector alpha(rows_);
    for (int r = 0; r < rows_; ++r) {
      const int b = head_[r];
      if (b < first_artificial()) continue;
      rho.setZero();
      rho[r] = 1.0;
      factor_.btran(rho);
      int best = -1;
      double best_abs = 1e-7;
      for (int v = 0; v < first_artificial(); ++v) {
        if (status_[v] == VarStatus::kBasic) continue;
        double dot = 0.0;
        for (int k = col_start_[v]; k < col_start_[v + 1]; ++k) {
          dot += rho[row_index_[k]] * col_value_[k];
        }
        if (std::abs(dot) > best_abs) {
          best_abs = std::abs(dot);
          best = v;
        }
      }
      if (best < 0) continue;  // redundant row; the artificial stays at zero
      load_column(best, alpha);
      factor_.ftran(alpha);
      status_[b] = VarStatus::kAtLower;
      x_[b] = 0.0;
      position_[b] = -1;
      head_[r] = best;
      position_[best] = r;
      status_[best] = VarStatus::kBasic;
      factor_.update(r, alpha);
      ++pivots_;
      if (static_cast<int>(factor_.num_updates()) >= options_.refactor_interval) refactor();
    }
    refactor();
  }

  const LpModel& model_;
  SimplexOptions options_;
  int rows_ = 0;
  int structurals_ = 0;
  int num_artificials_ = 0;
  long max_iterations_ = 0;

  std::vector<int> col_start_;
  std::vector<int> row_index_;
  std::vector<double> col_value_;
  std::vector<double> cost_, lower_, upper_;

  std::vector<VarStatus> status_;
  std::vector<double> x_;
  std::vector<int> head_;
  std::vector<int> position_;
  Vector duals_;
  BasisFactor factor_;

  long pivots_ = 0;
  long flips_ = 0;
  long degenerate_ = 0;
};

}  // namespace

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration limit";
    case LpStatus::kNumericalFailure: return "numerical failure";
  }
  return "unknown";
}

SimplexResult solve_simplex(const LpModel& model, const SimplexOptions& options) {
  if (model.num_rows() == 0) {
    SimplexResult result;
    result.status = LpStatus::kOptimal;
    result.values.resize(model.num_variables());
    for (int v = 0; v < model.num_variables(); ++v) {
      const double lo = model.lower(v);
      const double hi = model.upper(v);
      if (model.cost(v) < 0.0) {
        if (!std::isfinite(hi)) {
          result.status = LpStatus::kUnbounded;
          return result;
        }
        result.values[v] = hi;
      } else {
        if (!std::isfinite(lo)) {
          result.status = LpStatus::kUnbounded;
          return result;
        }
        result.values[v] = lo;
      }
      result.objective += model.cost(v) * result.values[v];
    }
    return result;
  }
  Simplex simplex(model, options);
  return simplex.run();
}

double max_constraint_violation(const LpModel& model, std::span<const double> values) {
  double worst = 0.0;
  std::vector<double> activity(model.num_rows(), 0.0);
  for (int v = 0; v < model.num_variables(); ++v) {
    worst = std::max(worst, model.lower(v) - values[v]);
    worst = std::max(worst, values[v] - model.upper(v));
    for (const LpEntry& e : model.column(v)) activity[e.row] += e.value * values[v];
  }
  for (int r = 0; r < model.num_rows(); ++r) {
    const double gap = model.sense(r) == RowSense::kGreaterEqual
                           ? model.rhs(r) - activity[r]
                           : activity[r] - model.rhs(r);
    worst = std::max(worst, gap);
  }
  return worst;
}

}  // namespace fairloc
