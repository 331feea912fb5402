"""Uniform centred grids and sampled functions on them."""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from roughhj.errors import ConfigError, DomainError

__all__ = ["Grid", "GridFunction", "to_csv", "write_csv", "read_csv"]


@dataclass(frozen=True)
class Grid:
    """Square grid ``[-L, L]^d`` with spacing ``dx``; the origin is always a node.

    Nodes per axis are ``2 * round(L / dx) + 1``, so the realised half-width
    :attr:`half_width` may differ from the requested ``L`` by up to ``dx / 2``.
    """

    dim: int
    L: float
    dx: float

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise ConfigError(f"grid dimension must be 1 or 2, got {self.dim}")
        if not self.dx > 0 or not self.L > 0:
            raise ConfigError(f"need L > 0 and dx > 0, got L={self.L}, dx={self.dx}")

    @property
    def n_half(self) -> int:
        return int(round(self.L / self.dx))

    @property
    def n(self) -> int:
        return 2 * self.n_half + 1

    @property
    def half_width(self) -> float:
        return self.n_half * self.dx

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def axis(self) -> np.ndarray:
        return self.dx * np.arange(-self.n_half, self.n_half + 1)

    def mesh(self) -> tuple[np.ndarray, ...]:
        return np.meshgrid(*([self.axis] * self.dim), indexing="ij")

    def sup_radius(self) -> np.ndarray:
        """Chebyshev distance of every node to the origin."""
        r = np.abs(self.axis)
        if self.dim == 1:
            return r
        return np.maximum(r[:, None], r[None, :])

    def index_of(self, point) -> tuple[int, ...]:
        """Nearest node to ``point``; raises if it falls off the grid."""
        p = np.atleast_1d(np.asarray(point, dtype=float))
        if p.shape != (self.dim,):
            raise DomainError(f"point {point} does not have dimension {self.dim}")
        idx = np.floor(p / self.dx + 0.5).astype(int) + self.n_half
        if np.any(idx < 0) or np.any(idx >= self.n):
            raise DomainError(f"point {point} lies outside the grid")
        return tuple(int(i) for i in idx)


@dataclass(eq=False)
class GridFunction:
    """Values of a function at every node of ``grid`` (``'ij'`` indexing)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ConfigError(
                f"values of shape {self.values.shape} do not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ConfigError("grid function values must be finite")

    @classmethod
    def from_function(cls, grid: Grid, f: Callable[..., np.ndarray]) -> "GridFunction":
        vals = np.broadcast_to(f(*grid.mesh()), grid.shape).astype(float)
        return cls(grid, vals)

    def at(self, point) -> float:
        return float(self.values[self.grid.index_of(point)])

    def copy(self) -> "GridFunction":
        return GridFunction(self.grid, self.values.copy())

    def __add__(self, c: float) -> "GridFunction":
        return GridFunction(self.grid, self.values + c)

    def sup_distance(self, other: "GridFunction", radius: float | None = None) -> float:
        """``max |f - g|``, optionally restricted to the Chebyshev ball of ``radius``."""
        diff = np.abs(self.values - other.values)
        if radius is not None:
            mask = self.grid.sup_radius() <= radius + 1e-9 * self.grid.dx
            diff = diff[mask]
        return float(diff.max()) if diff.size else 0.0


def to_csv(f: GridFunction) -> str:
    """Row-major dump with header ``x,y,value`` (``x,value`` in 1-D), using ``repr`` floats."""
    buf = io.StringIO()
    ax = f.grid.axis
    if f.grid.dim == 1:
        buf.write("x,value\n")
        for x, v in zip(ax, f.values):
            buf.write(f"{float(x)!r},{float(v)!r}\n")
    else:
        buf.write("x,y,value\n")
        for i, x in enumerate(ax):
            for j, y in enumerate(ax):
                buf.write(f"{float(x)!r},{float(y)!r},{float(f.values[i, j])!r}\n")
    return buf.getvalue()


def write_csv(f: GridFunction, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(to_csv(f))
    return path


def read_csv(path: str | Path, dx: float) -> GridFunction:
    """Inverse of :func:`write_csv` for grids written by this package."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    dim = data.shape[1] - 1
    n = int(round(len(data) ** (1.0 / dim)))
    grid = Grid(dim, float(np.max(np.abs(data[:, 0]))), dx)
    if grid.n != n:
        raise ConfigError(f"{path}: row count does not match a centred grid with dx={dx}")
    return GridFunction(grid, data[:, -1].reshape(grid.shape))
