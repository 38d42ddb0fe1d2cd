"""Deviation identity lab for clamped obstacle problems.

Nodal fields are float64 arrays in node order (x fastest); symmetric tensor
fields are (nodes, components) arrays with components (q11, q22, q12) in 2D.
"""

from ._core import (
    PAIR_CSV_HEADER,
    DevlabError,
    Grid,
    Problem,
    biharmonic_terms,
    brute_force_qp,
    coercivity,
    deviation_terms,
    div_div,
    dual_feasible,
    dual_objective,
    eval_expr,
    feasible_flux,
    hessian,
    inner,
    integrate,
    majorant,
    naive_flux,
    run,
    solve,
)

__all__ = [
    "PAIR_CSV_HEADER",
    "DevlabError",
    "Grid",
    "Problem",
    "biharmonic_terms",
    "brute_force_qp",
    "coercivity",
    "deviation_terms",
    "div_div",
    "dual_feasible",
    "dual_objective",
    "eval_expr",
    "feasible_flux",
    "hessian",
    "inner",
    "integrate",
    "majorant",
    "naive_flux",
    "run",
    "solve",
]
