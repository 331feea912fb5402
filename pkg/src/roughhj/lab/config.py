"""Experiment specifications and their documented defaults.

A configuration file is a JSON object::

    {"experiment": "theorem1",
     "path": {"kind": "zigzag", "amplitude": 1, "swings": 4, "T": 1},
     "R": 1, "epsilon": 0.1,
     "grid": {"L": null, "dx": 0.05},
     "engine": {"kind": "morphological", "m": 64, "cfl": null, "ordering": "erode_first"},
     "ladder": [0.04, 0.02, 0.01],
     "tolerances": {...},
     "out": "reports/"}

Missing keys fall back to the per-experiment defaults in :data:`DEFAULTS`.
``grid.L = null`` sizes the grid from the domain-of-dependence requirement.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from roughhj.errors import ConfigError
from roughhj.pde.solver import SolveConfig
from roughhj.signal import DrivingPath, path_from_spec

__all__ = ["NAMES", "DEFAULTS", "ExperimentSpec", "load_config"]

NAMES = (
    "theorem1",
    "separation",
    "stationary",
    "constant_ball",
    "cancellation",
    "classical_speed",
    "crosscheck",
)

_ZIGZAG_1_4 = {"kind": "zigzag", "amplitude": 1.0, "swings": 4, "T": 1.0}
_RAMP = {"kind": "knots", "points": [[0.0, 0.0], [1.0, 1.0]]}
_MORPH = {"kind": "morphological", "m": 64, "cfl": None, "ordering": "erode_first"}

DEFAULTS: dict[str, dict[str, Any]] = {
    "theorem1": {
        "path": _ZIGZAG_1_4,
        "R": 1.0,
        "engine": _MORPH,
        "ladder": [0.04, 0.02, 0.01],
        "tolerances": {"min_value": 0.65, "ladder_ratio": 0.8, "runtime_s": 120.0},
    },
    "separation": {
        "path": _ZIGZAG_1_4,
        "R": 2.0,
        "engine": _MORPH,
        "ladder": [0.04, 0.02],
        "tolerances": {"coincide": 1e-12},
    },
    "stationary": {
        "path": _ZIGZAG_1_4,
        "engine": _MORPH,
        "grid": {"L": None, "dx": 0.05},
        "ladder": [0.2, 0.1, 0.05],
        "observe_radius": 1.0,
        "tolerances": {"fixed_point": 1e-12, "lf_ratio": 0.8},
    },
    "constant_ball": {
        "path": {"kind": "zigzag", "amplitude": 0.5, "swings": 2, "T": 1.0},
        "A": 3.0,
        "R": 2.0,
        "K": None,
        "engine": _MORPH,
        "grid": {"L": None, "dx": 0.05},
        "tolerances": {"constant": 1e-12},
    },
    "cancellation": {
        "delta": 0.3,
        "ladder": [0.04, 0.02, 0.01, 0.005],
        "seed": 0,
        "n_arrays": 1000,
        "max_length": 64,
        "max_radius": 8,
        "observe_radius": 1.5,
        "tolerances": {"ratio": 0.8},
    },
    "classical_speed": {
        "path": _RAMP,
        "R": 2.0,
        "times": [0.5, 1.0],
        "engine": _MORPH,
        "grid": {"L": None, "dx": 0.05},
        "tolerances": {"agree": 1e-12},
    },
    "crosscheck": {
        "path": _RAMP,
        "R": 2.0,
        "terminal": "ic_paper",
        "levels": 3,
        "substeps": None,
        "engine": _MORPH,
        "grid": {"L": 4.0, "dx": None},
        "ladder": [0.05, 0.025, 0.0125],
        "tolerances": {"gap": 0.1, "ratio": 0.9},
    },
}

_COMMON = {
    "epsilon": 0.1,
    "A": 3.0,
    "K": None,
    "R": 1.0,
    "delta": 0.3,
    "times": [],
    "grid": {"L": None, "dx": 0.05},
    "ladder": [],
    "observe_radius": 0.0,
    "tolerances": {},
    "out": None,
    "vacuous_pass": False,
    "budget": 2e10,
}


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "path":
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


@dataclass
class ExperimentSpec:
    """Fully resolved parameters of one experiment."""

    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.name not in NAMES:
            raise ConfigError(f"unknown experiment {self.name!r}; choose from {', '.join(NAMES)}")
        p = _merge(_merge(_COMMON, DEFAULTS[self.name]), self.params)
        self.params = p
        if p["R"] is not None and p["R"] < 0:
            raise ConfigError("R must be nonnegative")
        if not 0 < p["epsilon"] < 1:
            raise ConfigError("epsilon must lie in (0, 1)")
        if any(not d > 0 for d in p["ladder"]):
            raise ConfigError("ladder spacings must be positive")
        if p["grid"].get("dx") is not None and not p["grid"]["dx"] > 0:
            raise ConfigError("grid.dx must be positive")
        if "path" in p:
            self.path  # validate early
        self.solve_config()

    @property
    def path(self) -> DrivingPath:
        return path_from_spec(self.params["path"])

    def solve_config(self, engine: str | None = None, **over) -> SolveConfig:
        e = dict(self.params.get("engine", {}))
        kind = engine or e.get("kind", "morphological")
        e.pop("kind", None)
        e.update(over)
        try:
            return SolveConfig(engine=kind, **e)
        except TypeError as exc:
            raise ConfigError(f"bad engine settings {e}: {exc}") from None

    def tol(self, key: str) -> float:
        try:
            return float(self.params["tolerances"][key])
        except KeyError:
            raise ConfigError(f"experiment {self.name} has no tolerance {key!r}") from None

    def echo(self) -> dict:
        return {"experiment": self.name, **copy.deepcopy(self.params)}


def load_config(source: str | Path | dict | None, name: str | None = None, overrides: dict | None = None) -> ExperimentSpec:
    """Build a spec from a JSON file (or dict), an optional name and flag overrides."""
    if source is None:
        data: dict = {}
    elif isinstance(source, dict):
        data = copy.deepcopy(source)
    else:
        try:
            data = json.loads(Path(source).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {source}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {source} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("a config must be a JSON object")
    cfg_name = data.pop("experiment", None)
    if name is not None and cfg_name is not None and name != cfg_name:
        raise ConfigError(f"config is for experiment {cfg_name!r}, not {name!r}")
    name = name or cfg_name
    if name is None:
        raise ConfigError("no experiment name given")
    params = _merge(data, overrides or {})
    return ExperimentSpec(name, params)
