"""Piecewise-linear driving signals.

A :class:`DrivingPath` is a continuous, piecewise-linear function on ``[0, T]``
given by its knots. Everything the solvers need from the driver is derived
here: total variation, running oscillation, the split into monotone segments
and the time reversal used to turn a backward problem into a forward one.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np

from roughhj.errors import ConfigError, DomainError

__all__ = [
    "DrivingPath",
    "Partition",
    "MonotoneSegment",
    "evaluate",
    "total_variation",
    "oscillation",
    "monotone_decomposition",
    "zigzag",
    "sample_brownian",
    "time_reverse",
    "restrict",
    "partition_variation",
    "theorem_bound",
    "path_from_spec",
    "path_to_spec",
    "parse_path",
]

# relative slack for "t lies in [0, T]" checks
_TIME_SLACK = 1e-12


def _frozen(a: Any) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DrivingPath:
    """Continuous piecewise-linear signal through ``(times[k], values[k])``."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        t = _frozen(self.times)
        v = _frozen(self.values)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        if t.ndim != 1 or v.shape != t.shape:
            raise ConfigError("times and values must be 1-D arrays of equal length")
        if t.size < 2:
            raise ConfigError("a path needs at least two knots")
        if t[0] != 0.0:
            raise ConfigError(f"first knot time must be 0, got {t[0]}")
        if not np.all(np.diff(t) > 0):
            raise ConfigError("knot times must be strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise ConfigError("knots must be finite")

    @classmethod
    def from_knots(cls, points: Iterable[Sequence[float]]) -> "DrivingPath":
        pts = [tuple(p) for p in points]
        if any(len(p) != 2 for p in pts):
            raise ConfigError("knots must be (time, value) pairs")
        return cls(np.array([p[0] for p in pts]), np.array([p[1] for p in pts]))

    @property
    def T(self) -> float:
        return float(self.times[-1])

    @property
    def knots(self) -> list[tuple[float, float]]:
        return [(float(t), float(v)) for t, v in zip(self.times, self.values)]

    def __call__(self, t):
        return evaluate(self, t)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DrivingPath):
            return NotImplemented
        return np.array_equal(self.times, other.times) and np.array_equal(
            self.values, other.values
        )

    def __repr__(self) -> str:
        return f"DrivingPath(n_knots={self.times.size}, T={self.T:g})"


@dataclass(frozen=True)
class Partition:
    """Ordered times ``0 = t_0 <= ... <= t_n = T``."""

    times: tuple[float, ...]

    def __post_init__(self) -> None:
        ts = tuple(float(t) for t in self.times)
        object.__setattr__(self, "times", ts)
        if len(ts) < 2:
            raise ConfigError("a partition needs n >= 1 increments")
        if ts[0] != 0.0:
            raise ConfigError("a partition must start at 0")
        if any(b < a for a, b in zip(ts, ts[1:])):
            raise ConfigError("partition times must be sorted")

    @property
    def n(self) -> int:
        return len(self.times) - 1

    @property
    def T(self) -> float:
        return self.times[-1]

    @classmethod
    def at_knots(cls, path: DrivingPath) -> "Partition":
        return cls(tuple(path.times))

    @classmethod
    def uniform(cls, T: float, n: int) -> "Partition":
        return cls(tuple(T * k / n for k in range(n + 1)))


@dataclass(frozen=True)
class MonotoneSegment:
    """Maximal strictly monotone stretch of a path.

    ``sign`` is +1 on rising stretches and -1 on falling ones; ``delta`` is
    the signed increment across the stretch.
    """

    t_start: float
    t_end: float
    delta: float

    def __post_init__(self) -> None:
        if self.delta == 0:
            raise ConfigError("a monotone segment must have nonzero increment")
        if not self.t_end > self.t_start:
            raise ConfigError("segment end must follow its start")

    @property
    def sign(self) -> int:
        return 1 if self.delta > 0 else -1

    @property
    def variation(self) -> float:
        return abs(self.delta)


def _check_time(path: DrivingPath, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    slack = _TIME_SLACK * max(1.0, path.T)
    if np.any(t < -slack) or np.any(t > path.T + slack) or np.any(np.isnan(t)):
        raise DomainError(f"time outside [0, {path.T}]: {t}")
    return np.clip(t, 0.0, path.T)


def evaluate(path: DrivingPath, t):
    """Linear interpolation of the knots; exact at knot times."""
    tt = _check_time(path, t)
    out = np.interp(tt, path.times, path.values)
    return float(out) if out.ndim == 0 else out


def total_variation(path: DrivingPath) -> float:
    return float(np.sum(np.abs(np.diff(path.values))))


def oscillation(path: DrivingPath, t: float) -> float:
    """``max - min`` of the path over ``[0, t]``."""
    t = float(_check_time(path, t))
    inside = path.times <= t
    vals = np.append(path.values[inside], evaluate(path, t))
    return float(vals.max() - vals.min())


def monotone_decomposition(path: DrivingPath) -> list[MonotoneSegment]:
    """Split the path into maximal strictly monotone segments, dropping flats."""
    segments: list[MonotoneSegment] = []
    inc = np.diff(path.values)
    start = None
    sign = 0
    for k, d in enumerate(inc):
        s = int(np.sign(d))
        if s != sign:
            if sign != 0:
                segments.append(_segment(path, start, k))
            start = k if s != 0 else None
            sign = s
    if sign != 0:
        segments.append(_segment(path, start, len(inc)))
    return segments


def _segment(path: DrivingPath, i: int, j: int) -> MonotoneSegment:
    return MonotoneSegment(
        float(path.times[i]), float(path.times[j]), float(path.values[j] - path.values[i])
    )


def zigzag(amplitude: float, n_swings: int, T: float = 1.0) -> DrivingPath:
    """Path ``0 -> amplitude -> 0 -> ...`` with ``n_swings`` legs of equal duration."""
    if not amplitude > 0 or not T > 0 or int(n_swings) != n_swings or n_swings < 1:
        raise ConfigError(
            f"zigzag needs amplitude > 0, n_swings >= 1, T > 0; got {amplitude}, {n_swings}, {T}"
        )
    n_swings = int(n_swings)
    times = T * np.arange(n_swings + 1) / n_swings
    times[-1] = T
    values = np.where(np.arange(n_swings + 1) % 2 == 1, float(amplitude), 0.0)
    return DrivingPath(times, values)


def sample_brownian(seed: int, n_steps: int, T: float = 1.0, scale: float = 1.0) -> DrivingPath:
    """Random walk with Gaussian steps of std ``scale * sqrt(T / n_steps)``.

    Uses ``numpy.random.default_rng(seed)`` (PCG64) and one call to
    ``standard_normal(n_steps)``, so a seed pins the path bit-for-bit.
    """
    if int(n_steps) != n_steps or n_steps < 1:
        raise ConfigError(f"n_steps must be a positive integer, got {n_steps}")
    if not T > 0:
        raise ConfigError(f"T must be positive, got {T}")
    n_steps = int(n_steps)
    rng = np.random.default_rng(seed)
    steps = scale * math.sqrt(T / n_steps) * rng.standard_normal(n_steps)
    values = np.concatenate([[0.0], np.cumsum(steps)])
    times = T * np.arange(n_steps + 1) / n_steps
    times[-1] = T
    return DrivingPath(times, values)


def time_reverse(path: DrivingPath) -> DrivingPath:
    """``eta(t) = xi(T) - xi(T - t)``, so that ``eta'(t) = xi'(T - t)``."""
    T = path.T
    times = (T - path.times)[::-1].copy()
    times[0] = 0.0
    times[-1] = T
    values = (path.values[-1] - path.values)[::-1]
    return DrivingPath(times, values)


def restrict(path: DrivingPath, t: float) -> DrivingPath:
    """The path on ``[0, t]``."""
    t = float(_check_time(path, t))
    if t <= 0:
        raise DomainError("cannot restrict a path to a degenerate interval")
    inside = path.times < t
    times = np.append(path.times[inside], t)
    values = np.append(path.values[inside], evaluate(path, t))
    return DrivingPath(times, values)


def partition_variation(path: DrivingPath, partition: Partition) -> float:
    """``sum_j |xi(t_{j+1}) - xi(t_j)|`` along a partition."""
    vals = np.asarray(evaluate(path, np.array(partition.times)))
    return float(np.sum(np.abs(np.diff(vals))))


def _turning_values(values: np.ndarray) -> np.ndarray:
    """Endpoints plus local extrema, with flat repeats collapsed."""
    v = [values[0]]
    for x in values[1:-1]:
        if x != v[-1]:
            v.append(x)
    v.append(values[-1])
    v = np.asarray(v)
    inner = (v[1:-1] - v[:-2]) * (v[2:] - v[1:-1]) < 0
    return np.concatenate([v[:1], v[1:-1][inner], v[-1:]])


def _best_sums(values: np.ndarray) -> np.ndarray:
    """``best[n]`` = max variation sum over partitions with exactly ``n`` increments.

    Partitions run over subsets of ``values`` keeping both endpoints; ``-inf``
    where no such partition exists.
    """
    K = len(values)
    jump = np.abs(values[None, :] - values[:, None])
    # forward-only moves i -> j with i < j
    jump[np.tril_indices(K)] = -np.inf
    best = np.full(K, -np.inf)
    best[0] = 0.0
    out = np.full(K, -np.inf)
    for n in range(1, K):
        best = np.max(best[:, None] + jump, axis=0)
        out[n] = best[-1]
    return out


def theorem_bound(
    path: DrivingPath,
    R: float,
    *,
    max_interior: int = 20,
    refine_midpoints: bool = False,
) -> float:
    r"""Lower bound for the origin value in the infinite-speed example.

    Computes

    .. math::

        \Big(\sup_{(t_0,\dots,t_n)} \frac{\sum_j |\xi(t_{j+1}) - \xi(t_j)|}{n}
        - \frac{R}{n}\Big)_+ \wedge 1

    with the supremum restricted to partitions whose points are knot times
    (optionally augmented with knot midpoints). Paths with more than
    ``max_interior`` interior candidates are reduced to their turning points.
    The restricted supremum never exceeds the one over all partitions, so the
    result is itself a valid lower bound.

    Every subset of candidates is covered: for each ``n`` a dynamic program
    finds the largest variation sum using exactly ``n`` increments.
    """
    if R < 0:
        raise DomainError(f"R must be nonnegative, got {R}")
    times = np.asarray(path.times)
    if refine_midpoints:
        mids = 0.5 * (times[1:] + times[:-1])
        times = np.sort(np.concatenate([times, mids]))
    values = np.asarray(evaluate(path, times))
    if len(values) - 2 > max_interior:
        values = _turning_values(values)
    sums = _best_sums(values)
    n = np.arange(len(sums))
    with np.errstate(invalid="ignore"):
        ratios = np.where(np.isfinite(sums) & (n > 0), (sums - R) / np.maximum(n, 1), -np.inf)
    best = float(np.max(ratios)) if ratios.size else 0.0
    return min(max(best, 0.0), 1.0)


def brute_force_bound(path: DrivingPath, R: float) -> float:
    """Enumerate every subset of interior knots; exponential, for checking only."""
    times = list(path.times)
    interior = times[1:-1]
    best = -math.inf
    for r in range(len(interior) + 1):
        for combo in itertools.combinations(interior, r):
            part = Partition((times[0], *combo, times[-1]))
            best = max(best, (partition_variation(path, part) - R) / part.n)
    return min(max(best, 0.0), 1.0)


def path_from_spec(spec: dict) -> DrivingPath:
    """Build a path from its JSON description (``knots``, ``zigzag`` or ``brownian``)."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(f"path spec must be an object with a 'kind': {spec!r}")
    kind = spec["kind"]
    try:
        if kind == "knots":
            return DrivingPath.from_knots(spec["points"])
        if kind == "zigzag":
            return zigzag(spec["amplitude"], spec["swings"], spec.get("T", 1.0))
        if kind == "brownian":
            return sample_brownian(
                spec["seed"], spec["steps"], spec.get("T", 1.0), spec.get("scale", 1.0)
            )
    except KeyError as exc:
        raise ConfigError(f"path spec of kind {kind!r} is missing {exc}") from None
    raise ConfigError(f"unknown path kind {kind!r}")


def path_to_spec(path: DrivingPath) -> dict:
    return {"kind": "knots", "points": [[t, v] for t, v in path.knots]}


def parse_path(text: str) -> DrivingPath:
    """Parse the command-line shorthand.

    ``zigzag:A,N,T``, ``brownian:SEED,STEPS,T,SCALE``, ``knots:t0,v0,t1,v1,...``
    or a JSON object.
    """
    text = text.strip()
    if text.startswith("{"):
        import json

        return path_from_spec(json.loads(text))
    kind, _, rest = text.partition(":")
    try:
        nums = [float(s) for s in rest.split(",")] if rest else []
    except ValueError:
        raise ConfigError(f"bad path shorthand {text!r}") from None
    if kind == "zigzag" and len(nums) in (2, 3):
        return zigzag(nums[0], int(nums[1]), *nums[2:])
    if kind == "brownian" and 2 <= len(nums) <= 4:
        return sample_brownian(int(nums[0]), int(nums[1]), *nums[2:])
    if kind == "knots" and len(nums) >= 4 and len(nums) % 2 == 0:
        return DrivingPath.from_knots(zip(nums[::2], nums[1::2]))
    raise ConfigError(f"bad path shorthand {text!r}")
