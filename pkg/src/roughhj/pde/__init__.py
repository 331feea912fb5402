"""Grid solvers for Hamilton-Jacobi equations driven by a rough signal."""

from roughhj.pde.grid import Grid, GridFunction, read_csv, to_csv, write_csv
from roughhj.pde.initial import abs_diff, cone_cap, ic_paper, theta
from roughhj.pde.morphology import dilate_axis, dilate_cells, erode_axis, erode_cells
from roughhj.pde.solver import (
    EvolveReport,
    SolveConfig,
    dependence_radius,
    evolve,
    point_key,
    required_half_width,
    sized_grid,
    solve_value_at,
    step_segment,
)

__all__ = [
    "Grid",
    "GridFunction",
    "read_csv",
    "to_csv",
    "write_csv",
    "abs_diff",
    "cone_cap",
    "ic_paper",
    "theta",
    "dilate_axis",
    "dilate_cells",
    "erode_axis",
    "erode_cells",
    "EvolveReport",
    "SolveConfig",
    "dependence_radius",
    "evolve",
    "point_key",
    "required_half_width",
    "sized_grid",
    "solve_value_at",
    "step_segment",
]
