"""Hamiltonians and the Lax-Friedrichs numerical flux.

A Hamiltonian is an evaluator plus declared per-axis Lipschitz bounds. The
bounds are trusted by the schemes (they set the dissipation and the CFL
limit) and can be spot-checked with :func:`check_lipschitz`.

Hamiltonians of the form ``H(p) = sum_i c_i |p_i|`` additionally carry their
coefficients in ``abs_coeffs``; the morphological engine needs exactly this
structure, since each term generates a dilation (``c_i > 0``) or an erosion
(``c_i < 0``) along its own axis.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from roughhj.errors import ConfigError

__all__ = [
    "HamiltonianSpec",
    "h_paper",
    "h_abs_1d",
    "evaluate",
    "lax_friedrichs_flux",
    "check_lipschitz",
    "by_name",
    "register",
]


@dataclass(frozen=True)
class HamiltonianSpec:
    """Evaluator ``func(p_0, ..., p_{d-1})`` acting elementwise on arrays.

    ``convex_axes`` / ``concave_axes`` record a saddle splitting
    ``H = H_1(p_convex) - H_2(p_concave)``; a fully convex H lists every axis
    as convex.
    """

    name: str
    dim: int
    func: Callable[..., np.ndarray]
    lipschitz: tuple[float, ...]
    is_convex: bool = False
    convex_axes: tuple[int, ...] = ()
    concave_axes: tuple[int, ...] = ()
    zero_at_origin: bool = True
    abs_coeffs: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise ConfigError(f"dimension must be 1 or 2, got {self.dim}")
        if len(self.lipschitz) != self.dim or min(self.lipschitz) <= 0:
            raise ConfigError("need one positive Lipschitz bound per axis")
        if self.abs_coeffs is not None and len(self.abs_coeffs) != self.dim:
            raise ConfigError("abs_coeffs must have one entry per axis")

    def __call__(self, p) -> float:
        return evaluate(self, p)

    def scaled(self, sigma: float) -> "HamiltonianSpec":
        """``sigma * H``; a negative factor swaps the convex and concave axes."""
        if sigma == 1:
            return self
        f = self.func
        lip = tuple(abs(sigma) * a for a in self.lipschitz)
        coeffs = None if self.abs_coeffs is None else tuple(sigma * c for c in self.abs_coeffs)
        if sigma >= 0:
            return replace(self, func=lambda *p: sigma * f(*p), lipschitz=lip, abs_coeffs=coeffs)
        return replace(
            self,
            name=f"{sigma:g}*{self.name}",
            func=lambda *p: sigma * f(*p),
            lipschitz=lip,
            abs_coeffs=coeffs,
            is_convex=False,
            convex_axes=self.concave_axes,
            concave_axes=self.convex_axes,
        )


def _saddle(px, py):
    return np.abs(px) - np.abs(py)


def h_paper() -> HamiltonianSpec:
    """``H(p_x, p_y) = |p_x| - |p_y|``: convex in x, concave in y."""
    return HamiltonianSpec(
        name="paper_saddle",
        dim=2,
        func=_saddle,
        lipschitz=(1.0, 1.0),
        convex_axes=(0,),
        concave_axes=(1,),
        abs_coeffs=(1.0, -1.0),
    )


def h_abs_1d() -> HamiltonianSpec:
    """``H(p) = |p|`` in one dimension."""
    return HamiltonianSpec(
        name="abs_1d",
        dim=1,
        func=np.abs,
        lipschitz=(1.0,),
        is_convex=True,
        convex_axes=(0,),
        abs_coeffs=(1.0,),
    )


def evaluate(H: HamiltonianSpec, p) -> float:
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if p.shape != (H.dim,):
        raise ConfigError(f"{H.name} expects a gradient of dimension {H.dim}, got shape {p.shape}")
    return float(H.func(*p))


def lax_friedrichs_flux(H: HamiltonianSpec, p_minus, p_plus, alphas) -> np.ndarray | float:
    r"""Monotone flux :math:`H(\bar p) - \sum_i \tfrac{\alpha_i}{2}(p_i^+ - p_i^-)`.

    ``p_minus`` and ``p_plus`` hold one-sided differences with the axis index
    first (shape ``(d, ...)``), so whole grids can be passed at once. The flux is nonincreasing in
    each ``p_i^+`` and nondecreasing in each ``p_i^-`` as long as every
    ``alphas[i]`` dominates the Lipschitz bound of H along axis ``i``.
    """
    alphas = np.asarray(alphas, dtype=float)
    if alphas.shape != (H.dim,):
        raise ConfigError(f"need {H.dim} dissipation coefficients, got {alphas.shape}")
    if np.any(alphas < np.asarray(H.lipschitz)):
        raise ConfigError(
            f"dissipation {alphas.tolist()} below Lipschitz bounds {list(H.lipschitz)}; "
            "the scheme would not be monotone"
        )
    pm = np.asarray(p_minus, dtype=float)
    pp = np.asarray(p_plus, dtype=float)
    if pm.shape != pp.shape or pm.shape[:1] != (H.dim,):
        raise ConfigError("p_minus and p_plus must share a shape starting with the dimension")
    out = H.func(*[0.5 * (pm[i] + pp[i]) for i in range(H.dim)])
    for i in range(H.dim):
        out = out - 0.5 * alphas[i] * (pp[i] - pm[i])
    return float(out) if np.ndim(out) == 0 else out


def check_lipschitz(H: HamiltonianSpec, n: int = 1000, seed: int = 0, spread: float = 10.0) -> float:
    """Largest violation of ``|H(p) - H(q)| <= sum_i a_i |p_i - q_i|`` on random pairs.

    Returns 0 when no violation is found (up to rounding).
    """
    rng = np.random.default_rng(seed)
    p = rng.uniform(-spread, spread, size=(n, H.dim))
    q = rng.uniform(-spread, spread, size=(n, H.dim))
    lhs = np.abs(H.func(*p.T) - H.func(*q.T))
    rhs = np.abs(p - q) @ np.asarray(H.lipschitz)
    return float(max(0.0, np.max(lhs - rhs - 1e-12 * (1 + rhs))))


_REGISTRY: dict[str, Callable[[], HamiltonianSpec]] = {
    "paper_saddle": h_paper,
    "abs_1d": h_abs_1d,
}


def register(name: str, factory: Callable[[], HamiltonianSpec]) -> None:
    """Make a compiled-in Hamiltonian addressable from configuration files."""
    if name in ("paper_saddle", "abs_1d"):
        raise ConfigError(f"{name!r} is a built-in name")
    _REGISTRY[name] = factory


def by_name(name: str) -> HamiltonianSpec:
    if name == "custom" and "custom" not in _REGISTRY:
        raise ConfigError("no 'custom' Hamiltonian has been registered")
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise ConfigError(f"unknown Hamiltonian {name!r}; known: {sorted(_REGISTRY)}") from None
