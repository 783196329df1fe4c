"""Facility location and k-median with fair outliers."""

from ._fairloc import (
    Instance,
    InputError,
    Solution,
    SolverError,
    budgets_for_percentage,
    exact_flfo,
    exact_kmfo,
    fl_cost,
    gap_instance,
    gdf_f,
    gdf_nf,
    kmedian_cost,
    lp_objective,
    lpr_f,
    lpr_nf,
    ls_nf,
    r_ls_f,
    r_ls_nf,
    sweep,
    synthetic,
    unfairness,
)

__all__ = [
    "Instance",
    "InputError",
    "Solution",
    "SolverError",
    "budgets_for_percentage",
    "exact_flfo",
    "exact_kmfo",
    "fl_cost",
    "gap_instance",
    "gdf_f",
    "gdf_nf",
    "kmedian_cost",
    "lp_objective",
    "lpr_f",
    "lpr_nf",
    "ls_nf",
    "r_ls_f",
    "r_ls_nf",
    "sweep",
    "synthetic",
    "unfairness",
]
