#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fairloc/bench.hpp"
#include "fairloc/greedy_dual.hpp"
#include "fairloc/kmedian.hpp"
#include "fairloc/lp.hpp"
#include "fairloc/oracle.hpp"
#include "fairloc/rounding.hpp"

namespace py = pybind11;
using namespace fairloc;

namespace {

using Matrix = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<Point> rows_of(const Matrix& a, const char* what) {
  if (a.ndim() != 2) throw py::value_error(std::string(what) + " must be a 2-d array");
  const auto r = a.unchecked<2>();
  std::vector<Point> out(r.shape(0), Point(r.shape(1)));
  for (py::ssize_t i = 0; i < r.shape(0); ++i) {
    for (py::ssize_t k = 0; k < r.shape(1); ++k) out[i][k] = r(i, k);
  }
  return out;
}

MetricInstance make_instance(const Matrix& clients, const std::vector<int>& groups,
                             const Matrix& facilities, const std::vector<double>& costs,
                             int num_groups) {
  const auto cp = rows_of(clients, "clients");
  const auto fp = rows_of(facilities, "facilities");
  if (groups.size() != cp.size()) throw py::value_error("groups must match clients");
  if (costs.size() != fp.size()) throw py::value_error("costs must match facilities");
  std::vector<Client> cl;
  for (std::size_t j = 0; j < cp.size(); ++j) cl.push_back({cp[j], groups[j]});
  std::vector<Facility> fa;
  for (std::size_t i = 0; i < fp.size(); ++i) fa.push_back({fp[i], costs[i]});
  return MetricInstance(std::move(cl), std::move(fa), {.num_groups = num_groups});
}

OutlierBudgets budgets_of(const std::vector<int>& b) { return OutlierBudgets{b}; }

py::dict record_dict(const SweepRecord& r) {
  py::dict d;
  d["algo"] = r.name.empty() ? std::string(to_string(r.algorithm)) : r.name;
  d["pct"] = r.pct;
  d["cost"] = r.cost;
  d["lp_obj"] = r.has_lp() ? py::object(py::float_(r.lp_objective)) : py::none();
  d["unfairness"] = r.unfairness;
  py::list groups;
  for (const auto& g : r.groups) {
    groups.append(py::dict(py::arg("group") = g.label, py::arg("ell") = g.ell,
                           py::arg("ell_prime") = g.ell_prime));
  }
  d["groups"] = groups;
  d["ms"] = r.ms;
  d["seed"] = r.seed;
  return d;
}

SweepConfig config_from(const py::dict& options) {
  SweepConfig cfg;
  for (auto item : options) {
    std::string key = py::str(item.first);
    for (auto& c : key) {
      if (c == '_') c = '-';
    }
    std::string value;
    if (py::isinstance<py::list>(item.second) || py::isinstance<py::tuple>(item.second)) {
      for (auto v : item.second) value += (value.empty() ? "" : ",") + std::string(py::str(v));
    } else {
      value = py::str(item.second);
    }
    apply_config_value(key, value, cfg);
  }
  if (!cfg.algorithms_set) cfg.algorithms = default_algorithms(cfg.problem);
  validate(cfg);
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_fairloc, m) {
  m.doc() = "Facility location and k-median with fair outliers";

  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  py::class_<MetricInstance>(m, "Instance")
      .def(py::init(&make_instance), py::arg("clients"), py::arg("groups"),
           py::arg("facilities"), py::arg("costs"), py::arg("num_groups") = 0)
      .def_property_readonly("num_clients", &MetricInstance::num_clients)
      .def_property_readonly("num_facilities", &MetricInstance::num_facilities)
      .def_property_readonly("num_groups", &MetricInstance::num_groups)
      .def("distance", &MetricInstance::distance, py::arg("facility"), py::arg("client"))
      .def("group_sizes", &MetricInstance::group_sizes)
      .def("facility_costs", [](const MetricInstance& inst) {
        std::vector<double> c;
        for (const auto& f : inst.facilities()) c.push_back(f.open_cost);
        return c;
      });

  py::class_<IntegralSolution>(m, "Solution")
      .def_readonly("open", &IntegralSolution::open)
      .def_readonly("outliers", &IntegralSolution::outliers)
      .def_readonly("assignment", &IntegralSolution::assignment)
      .def_readonly("facility_cost", &IntegralSolution::facility_cost)
      .def_readonly("connection_cost", &IntegralSolution::connection_cost)
      .def("outlier_counts", &IntegralSolution::outlier_counts)
      .def("__repr__", [](const IntegralSolution& s) {
        return "<Solution open=" + std::to_string(s.open.size()) +
               " outliers=" + std::to_string(s.num_outliers()) + ">";
      });

  m.def("fl_cost", [](const MetricInstance& inst, const IntegralSolution& s) {
    return solution_cost(inst, s, Objective::kFacilityLocation);
  });
  m.def("kmedian_cost", [](const MetricInstance& inst, const IntegralSolution& s) {
    return solution_cost(inst, s, Objective::kKMedian);
  });
  m.def("unfairness", [](const std::vector<int>& budgets, const IntegralSolution& s) {
    return unfairness(budgets_of(budgets), s);
  });
  m.def("budgets_for_percentage", [](const MetricInstance& inst, double pct) {
    return budgets_for_percentage(inst.group_sizes(), pct).per_group;
  });

  m.def(
      "lp_objective",
      [](const MetricInstance& inst, const std::vector<int>& budgets, bool fair) {
        const MetricInstance pruned = prune_pairs(inst);
        py::gil_scoped_release release;
        return solve_flfo_lp(pruned, budgets_of(budgets),
                             fair ? BudgetMode::kPerGroup : BudgetMode::kAggregate)
            .solution.objective_value;
      },
      py::arg("instance"), py::arg("budgets"), py::arg("fair") = true);

  m.def(
      "lpr_f",
      [](const MetricInstance& inst, const std::vector<int>& budgets, double epsilon) {
        RoundingConfig cfg;
        cfg.epsilon = epsilon;
        py::gil_scoped_release release;
        return lpr_f(inst, budgets_of(budgets), cfg);
      },
      py::arg("instance"), py::arg("budgets"), py::arg("epsilon") = 0.1);
  m.def(
      "lpr_nf",
      [](const MetricInstance& inst, const std::vector<int>& budgets, double epsilon) {
        RoundingConfig cfg;
        cfg.epsilon = epsilon;
        py::gil_scoped_release release;
        return lpr_nf(inst, budgets_of(budgets), cfg);
      },
      py::arg("instance"), py::arg("budgets"), py::arg("epsilon") = 0.1);
  m.def(
      "gdf_f",
      [](const MetricInstance& inst, const std::vector<int>& budgets) {
        return gdf_f(inst, budgets_of(budgets));
      },
      py::arg("instance"), py::arg("budgets"));
  m.def("gdf_nf", &gdf_nf, py::arg("instance"), py::arg("total_budget"));

  auto kcfg = [](int k, double gamma, double eps_guess) {
    KMedianConfig c;
    c.k = k;
    c.gamma = gamma;
    c.eps_guess = eps_guess;
    return c;
  };
  m.def(
      "r_ls_f",
      [kcfg](const MetricInstance& inst, const std::vector<int>& budgets, int k, double gamma,
             double eps_guess) {
        py::gil_scoped_release release;
        return r_ls_f(inst, budgets_of(budgets), kcfg(k, gamma, eps_guess));
      },
      py::arg("instance"), py::arg("budgets"), py::arg("k") = 5, py::arg("gamma") = 0.5,
      py::arg("eps_guess") = 0.5);
  m.def(
      "r_ls_nf",
      [kcfg](const MetricInstance& inst, int total, int k, double gamma, double eps_guess) {
        py::gil_scoped_release release;
        return r_ls_nf(inst, total, kcfg(k, gamma, eps_guess));
      },
      py::arg("instance"), py::arg("total_budget"), py::arg("k") = 5, py::arg("gamma") = 0.5,
      py::arg("eps_guess") = 0.5);
  m.def(
      "ls_nf",
      [](const MetricInstance& inst, int total, int k) { return ls_nf(inst, total, k); },
      py::arg("instance"), py::arg("total_budget"), py::arg("k") = 5);

  m.def(
      "exact_flfo",
      [](const MetricInstance& inst, const std::vector<int>& budgets) {
        return exact_flfo(inst, budgets_of(budgets));
      },
      py::arg("instance"), py::arg("budgets"));
  m.def(
      "exact_kmfo",
      [](const MetricInstance& inst, const std::vector<int>& budgets, int k) {
        return exact_kmfo(inst, budgets_of(budgets), k);
      },
      py::arg("instance"), py::arg("budgets"), py::arg("k"));

  m.def(
      "gap_instance",
      [](double f, int M) {
        GapInstance g = build_gap_instance(f, M);
        return py::make_tuple(std::move(g.instance), g.budgets.per_group);
      },
      py::arg("f"), py::arg("M"));

  m.def(
      "synthetic",
      [](int n_in, int n_out, int num_facilities, std::uint64_t seed) {
        SyntheticConfig cfg;
        cfg.n_in = n_in;
        cfg.n_out = n_out;
        cfg.num_facilities = num_facilities;
        cfg.seed = seed;
        LabeledInstance li = generate_synthetic(cfg);
        return py::make_tuple(std::move(li.instance), li.group_labels);
      },
      py::arg("n_in") = 500, py::arg("n_out") = 50, py::arg("num_facilities") = 100,
      py::arg("seed") = 1);

  m.def(
      "sweep",
      [](const py::dict& options) {
        const SweepConfig cfg = config_from(options);
        std::vector<SweepRecord> records;
        {
          py::gil_scoped_release release;
          records = run_sweep(load_dataset(cfg), cfg);
        }
        py::list out;
        for (const auto& r : records) out.append(record_dict(r));
        return out;
      },
      py::arg("options"),
      "Runs a sweep. Keys mirror the config file (underscores allowed for dashes).");
}
