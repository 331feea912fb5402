"""Initial data used by the experiments."""

from __future__ import annotations

import numpy as np

from roughhj.errors import ConfigError
from roughhj.pde.grid import Grid, GridFunction

__all__ = ["theta", "ic_paper", "abs_diff", "cone_cap"]


def theta(x, y, R: float):
    """``clamp(min(x, y) - R + 1, 0, 1)``.

    Nonnegative, equal to 1 exactly where ``min(x, y) >= R``, zero where
    ``min(x, y) <= R - 1`` and 1-Lipschitz.
    """
    return np.clip(np.minimum(x, y) - R + 1.0, 0.0, 1.0)


def ic_paper(grid: Grid, R: float) -> GridFunction:
    """``|x - y| + theta(x, y)``; agrees with ``|x - y|`` on the ball of radius ``R - 1``."""
    if grid.dim != 2:
        raise ConfigError("ic_paper lives on a 2-D grid")
    if R > grid.half_width:
        raise ConfigError(f"R={R} exceeds the grid half-width {grid.half_width}")
    return GridFunction.from_function(grid, lambda x, y: np.abs(x - y) + theta(x, y, R))


def abs_diff(grid: Grid) -> GridFunction:
    """The stationary solution ``|x - y|``."""
    if grid.dim != 2:
        raise ConfigError("abs_diff lives on a 2-D grid")
    return GridFunction.from_function(grid, lambda x, y: np.abs(x - y))


def cone_cap(grid: Grid, A: float, R: float, K: float) -> GridFunction:
    """``A - K (|z|_inf - R)_+``: constant ``A`` on the sup-norm ball of radius ``R``."""
    return GridFunction(grid, A - K * np.maximum(grid.sup_radius() - R, 0.0))
