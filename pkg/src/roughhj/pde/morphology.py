"""Flat dilation and erosion along one grid axis.

Dilation by a segment of half-width ``r`` is the exact solution operator of
``u_s = |u_x|`` after time ``r``; erosion solves ``u_s = -|u_x|``. On the grid,
they are sliding-window max/min with clamped windows at the boundary.
"""

from __future__ import annotations

import numpy as np
from scipy.ndimage import maximum_filter1d, minimum_filter1d

from roughhj.errors import DomainError
from roughhj.pde.grid import GridFunction

__all__ = ["dilate_cells", "erode_cells", "dilate_axis", "erode_axis", "cells_for"]


def cells_for(radius: float, dx: float) -> int:
    """Window half-width ``round(radius / dx)``, halves rounded up."""
    if radius < 0:
        raise DomainError(f"radius must be nonnegative, got {radius}")
    return int(np.floor(radius / dx + 0.5 + 1e-9))


def dilate_cells(values: np.ndarray, axis: int, k: int) -> np.ndarray:
    """Max over ``[i - k, i + k]`` along ``axis``, clamped to the array."""
    if k < 0:
        raise DomainError(f"window half-width must be nonnegative, got {k}")
    if k == 0:
        return values
    # mode="nearest" repeats the edge value, which already lies in the clamped window
    return maximum_filter1d(values, 2 * k + 1, axis=axis, mode="nearest")


def erode_cells(values: np.ndarray, axis: int, k: int) -> np.ndarray:
    if k < 0:
        raise DomainError(f"window half-width must be nonnegative, got {k}")
    if k == 0:
        return values
    return minimum_filter1d(values, 2 * k + 1, axis=axis, mode="nearest")


def dilate_axis(f: GridFunction, axis: int, radius: float) -> GridFunction:
    k = cells_for(radius, f.grid.dx)
    return GridFunction(f.grid, dilate_cells(f.values, axis, k).copy())


def erode_axis(f: GridFunction, axis: int, radius: float) -> GridFunction:
    k = cells_for(radius, f.grid.dx)
    return GridFunction(f.grid, erode_cells(f.values, axis, k).copy())
