"""The two-player game behind ``u_t = (|u_x| - |u_y|) xi'(t)``.

A pair ``(x, y)`` starts at the origin. While ``xi`` rises the maximising
player steers ``x`` and the minimising player steers ``y``; while it falls
the roles swap. Both move at speed up to ``|xi'|``::

    x' = xi'_+ alpha + xi'_- beta,    y' = xi'_- alpha + xi'_+ beta

and the terminal payoff is ``|x(T) - y(T)| + theta(x(T), y(T))``.

This module provides the backward dynamic-programming value on a grid, exact
simulation of piecewise-constant plays, the tracking strategy ``delta_eps``
that the lower bound is built on, a checker for the inductive estimate along
a partition, and exhaustive / DP searches for the minimiser's best reply.
"""

from __future__ import annotations

import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from roughhj.errors import ConfigError, ContractError
from roughhj.pde.grid import Grid, GridFunction
from roughhj.pde.initial import theta
from roughhj.signal import DrivingPath, Partition, evaluate, monotone_decomposition, total_variation

__all__ = [
    "GameConfig",
    "ValueTable",
    "PiecewiseConstant",
    "Strategy",
    "Trajectory",
    "ControlFamily",
    "control_levels",
    "dp_value",
    "payoff",
    "simulate",
    "delta_eps",
    "constant",
    "custom",
    "induction_check",
    "adversary_search",
    "best_response_dp",
    "isaacs_identity",
]

_TOL = 1e-12


def control_levels(levels: int) -> np.ndarray:
    """``levels`` equispaced points in ``[-1, 1]``; odd counts include 0."""
    if int(levels) != levels or levels < 3 or levels % 2 == 0:
        raise ConfigError(f"control levels must be an odd integer >= 3, got {levels}")
    return np.linspace(-1.0, 1.0, int(levels))


# ---------------------------------------------------------------- DP value


@dataclass(frozen=True)
class GameConfig:
    """Discretisation of the game.

    ``substeps`` is the number of time steps per monotone segment; ``None``
    picks ``ceil(|delta| / dx)`` so that each step moves a player by at most
    one cell.
    """

    grid: Grid
    terminal: GridFunction
    substeps: int | None = None
    levels: int = 3

    def __post_init__(self) -> None:
        if self.grid.dim != 2:
            raise ConfigError("the game lives on a 2-D grid")
        if self.terminal.grid != self.grid:
            raise ConfigError("terminal data must live on the game grid")
        if self.substeps is not None and (int(self.substeps) != self.substeps or self.substeps < 1):
            raise ConfigError(f"substeps must be a positive integer, got {self.substeps}")
        control_levels(self.levels)


@dataclass
class ValueTable:
    """Slices ``v(t_k, .)`` ordered backward in time: ``slices[0]`` is the terminal data."""

    times: list[float]
    slices: list[GridFunction]

    @property
    def initial(self) -> GridFunction:
        return self.slices[-1]

    def value_at(self, point, k: int = -1) -> float:
        return self.slices[k].at(point)


def _shift_axis(v: np.ndarray, axis: int, cells: float) -> np.ndarray:
    """``v`` linearly interpolated at ``index + cells`` along ``axis``, clamped."""
    n = v.shape[axis]
    idx = np.arange(n)
    c = round(cells)
    if abs(cells - c) < 1e-9:
        return np.take(v, np.clip(idx + c, 0, n - 1), axis=axis)
    lo = math.floor(cells)
    w = cells - lo
    a = np.take(v, np.clip(idx + lo, 0, n - 1), axis=axis)
    b = np.take(v, np.clip(idx + lo + 1, 0, n - 1), axis=axis)
    return (1.0 - w) * a + w * b


def _shift(v: np.ndarray, sx: float, sy: float, dx: float) -> np.ndarray:
    return _shift_axis(_shift_axis(v, 0, sx / dx), 1, sy / dx)


def _dp_substep(v: np.ndarray, plus: float, minus: float, controls: np.ndarray, dx: float) -> np.ndarray:
    best = None
    for a in controls:
        worst = None
        for b in controls:
            cand = _shift(v, plus * a + minus * b, minus * a + plus * b, dx)
            worst = cand if worst is None else np.minimum(worst, cand)
        best = worst if best is None else np.maximum(best, worst)
    return best


def dp_value(
    path: DrivingPath,
    cfg: GameConfig,
    observe_radius: float = 0.0,
    keep_substeps: bool = False,
) -> ValueTable:
    """Backward induction for the game value with terminal data ``cfg.terminal``.

    Each step takes ``max_a min_b`` of the next slice, bilinearly
    interpolated at the displaced point. Slices are kept at the segment
    boundaries (every step with ``keep_substeps``).
    """
    grid = cfg.grid
    dx = grid.dx
    required = observe_radius + total_variation(path) + 2 * dx
    if grid.half_width < required - 1e-9 * dx:
        raise ConfigError(
            f"game grid half-width {grid.half_width:g} too small: need L >= {required:g}"
        )
    controls = control_levels(cfg.levels)
    v = cfg.terminal.values.copy()
    times = [path.T]
    slices = [GridFunction(grid, v.copy())]
    for seg in reversed(monotone_decomposition(path)):
        n = cfg.substeps or max(1, math.ceil(seg.variation / dx - 1e-9))
        step = seg.variation / n
        plus, minus = (step, 0.0) if seg.sign > 0 else (0.0, step)
        for j in range(n):
            v = _dp_substep(v, plus, minus, controls, dx)
            if keep_substeps and j < n - 1:
                times.append(seg.t_end - (j + 1) * (seg.t_end - seg.t_start) / n)
                slices.append(GridFunction(grid, v.copy()))
        times.append(seg.t_start)
        slices.append(GridFunction(grid, v.copy()))
    if times[-1] != 0.0:
        times.append(0.0)
        slices.append(GridFunction(grid, v.copy()))
    return ValueTable(times, slices)


# ---------------------------------------------------------------- plays


@dataclass(frozen=True)
class PiecewiseConstant:
    """Control equal to ``values[k]`` on ``[breaks[k], breaks[k+1])``."""

    breaks: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        b = tuple(float(t) for t in self.breaks)
        v = tuple(float(a) for a in self.values)
        object.__setattr__(self, "breaks", b)
        object.__setattr__(self, "values", v)
        if len(b) != len(v) + 1 or not v:
            raise ConfigError("need one more break than values")
        if b[0] != 0.0 or any(t1 <= t0 for t0, t1 in zip(b, b[1:])):
            raise ConfigError("breaks must start at 0 and increase strictly")
        if any(abs(a) > 1 + _TOL for a in v):
            raise ConfigError("controls must lie in [-1, 1]")

    @classmethod
    def uniform(cls, values: Sequence[float], T: float) -> "PiecewiseConstant":
        n = len(values)
        breaks = [T * k / n for k in range(n + 1)]
        breaks[-1] = T
        return cls(tuple(breaks), tuple(values))

    @classmethod
    def const(cls, value: float, T: float) -> "PiecewiseConstant":
        return cls((0.0, T), (value,))

    @property
    def T(self) -> float:
        return self.breaks[-1]

    def __call__(self, t: float) -> float:
        k = int(np.searchsorted(self.breaks, t, side="right")) - 1
        return self.values[min(max(k, 0), len(self.values) - 1)]


class _PastOnly:
    """View of ``beta`` that refuses to look past ``now``."""

    def __init__(self, beta: PiecewiseConstant, now: float):
        self._beta = beta
        self.now = now

    def __call__(self, s: float) -> float:
        if s > self.now + _TOL:
            raise ContractError(
                f"strategy queried beta at t={s} while deciding at t={self.now}; "
                "progressive strategies may only use the past"
            )
        return self._beta(s)


@dataclass(frozen=True)
class Strategy:
    """A progressive strategy for the maximiser.

    ``kind`` is ``"delta_eps"`` (parameter ``eps``), ``"constant"``
    (parameter ``value``) or ``"custom"``. A custom ``func(t, beta)`` returns
    the control for the piece starting at ``t`` and may evaluate ``beta`` only
    at times ``<= t``.
    """

    kind: str
    eps: float | None = None
    value: float | None = None
    func: Callable[[float, Callable[[float], float]], float] | None = None

    @property
    def tag(self) -> str:
        if self.kind == "delta_eps":
            return f"delta_eps({self.eps:g})"
        if self.kind == "constant":
            return f"constant({self.value:g})"
        return "custom"


def delta_eps(eps: float) -> Strategy:
    """Push right at full speed until ``|x - y|`` reaches ``eps``, then copy ``beta``.

    After the switch both coordinates move with velocity ``|xi'| beta``, so
    their distance stays frozen at ``eps``.
    """
    if not 0 < eps:
        raise ConfigError(f"eps must be positive, got {eps}")
    return Strategy("delta_eps", eps=float(eps))


def constant(a: float) -> Strategy:
    if abs(a) > 1:
        raise ConfigError(f"constant control must lie in [-1, 1], got {a}")
    return Strategy("constant", value=float(a))


def custom(func: Callable[[float, Callable[[float], float]], float]) -> Strategy:
    return Strategy("custom", func=func)


@dataclass
class Trajectory:
    """Exact piecewise-linear play.

    ``alpha[k]`` and ``beta[k]`` are the controls on ``[times[k], times[k+1])``.
    """

    path: DrivingPath
    times: np.ndarray
    x: np.ndarray
    y: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    tau: float | None = None
    eps: float | None = None

    def position(self, t) -> tuple[float, float]:
        return float(np.interp(t, self.times, self.x)), float(np.interp(t, self.times, self.y))

    @property
    def final(self) -> tuple[float, float]:
        return float(self.x[-1]), float(self.y[-1])

    def max_gap(self) -> float:
        return float(np.max(np.abs(self.x - self.y)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t,x,y,alpha,beta\n")
        a = np.append(self.alpha, self.alpha[-1:])
        b = np.append(self.beta, self.beta[-1:])
        for row in zip(self.times, self.x, self.y, a, b):
            buf.write(",".join(repr(float(c)) for c in row) + "\n")
        return buf.getvalue()


def payoff(traj: Trajectory, R: float) -> float:
    """``|x(T) - y(T)| + theta(x(T), y(T))``."""
    x, y = traj.final
    return float(abs(x - y) + theta(x, y, R))


def _grid_times(path: DrivingPath, beta: PiecewiseConstant, dt: float | None) -> np.ndarray:
    pts = [path.times, np.asarray(beta.breaks)]
    if dt is not None:
        if not dt > 0:
            raise ConfigError(f"dt must be positive, got {dt}")
        n = max(1, round(path.T / dt))
        pts.append(path.T * np.arange(n + 1) / n)
    t = np.unique(np.concatenate(pts))
    # merge breakpoints that differ only by rounding
    keep = np.concatenate([[True], np.diff(t) > 1e-12 * max(1.0, path.T)])
    t = t[keep]
    t[-1] = path.T
    return t


def simulate(
    path: DrivingPath,
    strat: Strategy,
    beta: PiecewiseConstant,
    dt: float | None = None,
) -> Trajectory:
    """Play ``strat`` against ``beta`` and integrate the dynamics exactly.

    Pieces are the common refinement of the path knots, the breaks of
    ``beta`` and (optionally) a uniform grid of step ``dt``; on each piece
    both controls and ``xi'`` are constant, so positions are exact. For
    ``delta_eps`` the switching time ``tau`` is located exactly inside its
    piece, which is then split there.
    """
    if abs(beta.T - path.T) > 1e-12 * max(1.0, path.T):
        raise ConfigError(f"beta is defined on [0, {beta.T}] but the path on [0, {path.T}]")
    grid = _grid_times(path, beta, dt)
    xi = np.asarray(evaluate(path, grid))
    times, xs, ys, alphas, betas = [0.0], [0.0], [0.0], [], []
    x = y = 0.0
    tau = None
    for k in range(len(grid) - 1):
        t0, t1 = float(grid[k]), float(grid[k + 1])
        d = float(xi[k + 1] - xi[k])
        up, dn = max(d, 0.0), max(-d, 0.0)
        b = beta(t0)
        if strat.kind == "delta_eps" and tau is None:
            a = 1.0
            gap0 = x - y
            gap1 = gap0 + (up + dn * b) - (dn + up * b)
            if abs(gap0) >= strat.eps - _TOL:
                # reached at the end of the previous piece up to rounding
                tau = t0
                a = b
            elif abs(gap1) >= strat.eps:
                target = strat.eps if gap1 > 0 else -strat.eps
                s = (target - gap0) / (gap1 - gap0)
                t_hit = t0 + s * (t1 - t0)
                if s < 1.0 and t_hit > t0:
                    x, y = x + s * (up + dn * b), y + s * (dn + up * b)
                    times.append(t_hit)
                    xs.append(x)
                    ys.append(y)
                    alphas.append(1.0)
                    betas.append(b)
                    tau = t_hit
                    up, dn = (1 - s) * up, (1 - s) * dn
                    a = b
                else:
                    tau = t1
        elif strat.kind == "delta_eps":
            a = b
        elif strat.kind == "constant":
            a = strat.value
        else:
            a = float(strat.func(t0, _PastOnly(beta, t0)))
        if abs(a) > 1 + _TOL:
            raise ContractError(f"strategy returned control {a} outside [-1, 1]")
        x, y = x + up * a + dn * b, y + dn * a + up * b
        times.append(t1)
        xs.append(x)
        ys.append(y)
        alphas.append(a)
        betas.append(b)
    return Trajectory(
        path=path,
        times=np.array(times),
        x=np.array(xs),
        y=np.array(ys),
        alpha=np.array(alphas),
        beta=np.array(betas),
        tau=tau,
        eps=strat.eps,
    )


def respond(path: DrivingPath, strat: Strategy, beta: PiecewiseConstant) -> PiecewiseConstant:
    """The maximiser's control ``strat(beta)`` as a piecewise-constant function."""
    traj = simulate(path, strat, beta)
    return PiecewiseConstant(tuple(traj.times), tuple(traj.alpha))


# ---------------------------------------------------------------- proof checks


def induction_check(traj: Trajectory, partition: Partition, eps: float) -> tuple[bool, int | None]:
    """Check ``min(x, y)(t_i) >= sum_{j<i} |xi(t_{j+1}) - xi(t_j)| - i * eps`` for all ``i``.

    Returns ``(True, None)`` or ``(False, i)`` with the first failing index.
    Only meaningful for plays against ``delta_eps(eps)`` that never switch.
    """
    if traj.tau is not None or traj.max_gap() >= eps:
        raise ContractError(
            "induction_check needs a play whose gap |x - y| stays below eps (tau not triggered)"
        )
    if abs(partition.T - traj.path.T) > 1e-12 * max(1.0, traj.path.T):
        raise ConfigError("partition and trajectory cover different horizons")
    ts = np.array(partition.times)
    xi = np.asarray(evaluate(traj.path, ts))
    sums = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(xi)))])
    xs = np.interp(ts, traj.times, traj.x)
    ys = np.interp(ts, traj.times, traj.y)
    lower = sums - eps * np.arange(len(ts))
    slack = _TOL * (1.0 + np.abs(sums))
    bad = np.nonzero(np.minimum(xs, ys) < lower - slack)[0]
    if bad.size:
        return False, int(bad[0])
    return True, None


@dataclass(frozen=True)
class ControlFamily:
    """Finite family of minimiser controls.

    ``kind="exhaustive"``: every piecewise-constant control on ``pieces``
    equal subintervals with values in ``levels``. ``kind="dp"``: best
    response by dynamic programming over the same pieces, for ``delta_eps``
    only.
    """

    pieces: int = 8
    levels: tuple[float, ...] = (-1.0, 0.0, 1.0)
    kind: str = "exhaustive"
    cap: int = 3**12

    def size(self) -> int:
        return len(self.levels) ** self.pieces

    def enumerate(self, T: float) -> Iterator[PiecewiseConstant]:
        if self.size() > self.cap:
            raise ConfigError(f"search space of {self.size()} controls exceeds cap {self.cap}")
        for vals in itertools.product(self.levels, repeat=self.pieces):
            yield PiecewiseConstant.uniform(vals, T)


def adversary_search(
    path: DrivingPath,
    strat: Strategy,
    R: float,
    family: ControlFamily = ControlFamily(),
) -> tuple[PiecewiseConstant, float]:
    """Minimiser's best reply to ``strat`` within ``family``: ``(beta*, J*)``."""
    if family.kind == "dp":
        if strat.kind != "delta_eps":
            raise ConfigError("the DP best response is only available against delta_eps")
        return best_response_dp(path, strat.eps, R, family)
    if family.kind != "exhaustive":
        raise ConfigError(f"unknown control family kind {family.kind!r}")
    best_beta, best_j = None, math.inf
    for beta in family.enumerate(path.T):
        j = payoff(simulate(path, strat, beta), R)
        if j < best_j:
            best_beta, best_j = beta, j
    return best_beta, best_j


def best_response_dp(
    path: DrivingPath,
    eps: float,
    R: float,
    family: ControlFamily = ControlFamily(kind="dp"),
    max_states: int = 2_000_000,
) -> tuple[PiecewiseConstant, float]:
    """Exact best reply to ``delta_eps(eps)`` over the controls of ``family``.

    Before the switch the maximiser's control is fixed, so the play is
    Markov in ``(piece, x, y)``. After the switch ``|x - y|`` stays at
    ``eps`` and the minimiser can do no better than pushing both
    coordinates left for the rest of the horizon, which has a closed form.
    """
    T = path.T
    n = family.pieces
    breaks = np.array([T * k / n for k in range(n + 1)])
    breaks[-1] = T
    knots = np.unique(np.concatenate([breaks, path.times]))
    xi = np.asarray(evaluate(path, knots))
    # per control piece: list of (up, dn) sub-pieces where xi is linear
    owner = np.searchsorted(breaks, knots[:-1], side="right") - 1
    moves: list[list[tuple[float, float]]] = [[] for _ in range(n)]
    for k in range(len(knots) - 1):
        d = float(xi[k + 1] - xi[k])
        moves[min(owner[k], n - 1)].append((max(d, 0.0), max(-d, 0.0)))
    remaining = np.zeros(n + 1)
    for k in range(n - 1, -1, -1):
        remaining[k] = remaining[k + 1] + sum(u + d for u, d in moves[k])
    memo: dict[tuple[int, float, float], tuple[float, float]] = {}

    def after_switch(x: float, y: float, rem: float) -> float:
        return abs(x - y) + float(theta(min(x, y) - rem, min(x, y) - rem, R))

    def play_piece(k: int, x: float, y: float, b: float) -> tuple[float, float, float | None]:
        """Advance through piece ``k``; returns the end state or the payoff if it switches."""
        subs = moves[k]
        for i, (up, dn) in enumerate(subs):
            gap0 = x - y
            gap1 = gap0 + (up + dn * b) - (dn + up * b)
            if abs(gap1) >= eps or abs(gap0) >= eps - _TOL:
                target = eps if gap1 > 0 else -eps
                s = 0.0 if abs(gap0) >= eps - _TOL else (target - gap0) / (gap1 - gap0)
                x, y = x + s * (up + dn * b), y + s * (dn + up * b)
                # rest of this piece follows beta = b with both moving together
                shift = (1 - s) * (up + dn) * b + sum((u + d) * b for u, d in subs[i + 1 :])
                x, y = x + shift, y + shift
                return x, y, after_switch(x, y, remaining[k + 1])
            x, y = x + up + dn * b, y + dn + up * b
        return x, y, None

    def value(k: int, x: float, y: float) -> tuple[float, float]:
        if k == n:
            return abs(x - y) + float(theta(x, y, R)), math.nan
        key = (k, round(x, 12), round(y, 12))
        if key in memo:
            return memo[key]
        if len(memo) > max_states:
            raise ConfigError(f"best-response DP exceeded {max_states} states")
        best = (math.inf, math.nan)
        for b in family.levels:
            nx, ny, done = play_piece(k, x, y, b)
            j = done if done is not None else value(k + 1, nx, ny)[0]
            if j < best[0]:
                best = (j, b)
        memo[key] = best
        return best

    j_star, _ = value(0, 0.0, 0.0)
    # replay the optimal controls
    vals: list[float] = []
    x = y = 0.0
    switched = False
    for k in range(n):
        if switched:
            vals.append(-1.0 if -1.0 in family.levels else min(family.levels))
            continue
        _, b = value(k, x, y)
        vals.append(b)
        x, y, done = play_piece(k, x, y, b)
        switched = done is not None
    return PiecewiseConstant(tuple(breaks), tuple(vals)), float(j_star)


def isaacs_identity(p, xi_dot: float, levels: int) -> tuple[float, float, float]:
    """Compare ``(|p_x| - |p_y|) xi'`` with its discretised sup-inf representation."""
    px, py = (float(c) for c in p)
    lhs = (abs(px) - abs(py)) * xi_dot
    ctrl = control_levels(levels)
    plus, minus = max(xi_dot, 0.0), max(-xi_dot, 0.0)
    a = ctrl[:, None]
    b = ctrl[None, :]
    table = plus * (a * px + b * py) + minus * (a * py + b * px)
    rhs = float(np.max(np.min(table, axis=1)))
    return lhs, rhs, abs(lhs - rhs)
