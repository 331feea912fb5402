"""Self-auditing experiment reports.

Each :class:`Verdict` stores the numbers it was decided from together with
the relation and threshold, so :func:`recheck` can recompute every verdict
from a serialized report without re-running anything.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from roughhj.errors import ConfigError
from roughhj.pde.grid import GridFunction, to_csv

__all__ = ["Verdict", "Report", "decide", "recheck", "emit_report"]

RELATIONS = ("le", "ge", "gt", "all_le", "all_gt", "shrinks", "contracts", "true")


def _finite(x):
    if isinstance(x, list):
        return [_finite(v) for v in x]
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def decide(relation: str, values: list[float], threshold: float | None) -> bool:
    """Evaluate ``relation`` on recorded numbers.

    ``shrinks`` means each value is at most ``threshold`` times the previous
    one; ``contracts`` applies the same test to successive differences.
    """
    if relation == "le":
        return values[0] <= threshold
    if relation == "ge":
        return values[0] >= threshold
    if relation == "gt":
        return values[0] > threshold
    if relation == "all_le":
        return all(v <= threshold for v in values)
    if relation == "all_gt":
        return all(v > threshold for v in values)
    if relation == "shrinks":
        return len(values) >= 2 and all(b <= threshold * a for a, b in zip(values, values[1:]))
    if relation == "contracts":
        diffs = [abs(b - a) for a, b in zip(values, values[1:])]
        return len(diffs) >= 2 and all(
            d1 <= threshold * d0 for d0, d1 in zip(diffs, diffs[1:])
        )
    if relation == "true":
        return all(bool(v) for v in values)
    raise ConfigError(f"unknown relation {relation!r}")


@dataclass
class Verdict:
    criterion: str
    relation: str
    values: list[float]
    threshold: float | None
    passed: bool = field(init=False)
    note: str = ""

    def __post_init__(self) -> None:
        self.values = [float(v) for v in self.values]
        self.passed = decide(self.relation, self.values, self.threshold)


@dataclass
class Report:
    name: str
    config: dict
    measurements: dict = field(default_factory=dict)
    verdicts: list[Verdict] = field(default_factory=list)
    runtimes: dict[str, float] = field(default_factory=dict)
    grids: dict[str, GridFunction] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def add(self, criterion: str, relation: str, values, threshold=None, note: str = "") -> Verdict:
        if not isinstance(values, (list, tuple)):
            values = [values]
        v = Verdict(criterion, relation, list(values), threshold, note)
        self.verdicts.append(v)
        return v

    def to_dict(self) -> dict:
        """Deterministic content (timings excluded; see :meth:`timing_dict`)."""
        return {
            "experiment": self.name,
            "config": self.config,
            "measurements": {k: _finite(v) for k, v in self.measurements.items()},
            "verdicts": [asdict(v) for v in self.verdicts],
            "passed": self.passed,
            "grids": sorted(self.grids),
        }

    def timing_dict(self) -> dict:
        return {"experiment": self.name, "runtimes": dict(self.runtimes)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def summary_lines(self) -> list[str]:
        lines = []
        for v in self.verdicts:
            status = "PASS" if v.passed else "FAIL"
            vals = ", ".join(f"{x:.6g}" for x in v.values)
            thr = "" if v.threshold is None else f" (threshold {v.threshold:g})"
            note = f" - {v.note}" if v.note else ""
            lines.append(f"[{status}] {self.name}.{v.criterion}: {v.relation} [{vals}]{thr}{note}")
        return lines


def recheck(report: dict) -> list[bool]:
    """Recompute each verdict of a serialized report from its recorded numbers."""
    return [decide(v["relation"], v["values"], v["threshold"]) for v in report["verdicts"]]


def emit_report(report: Report, out_dir: str | Path, fmt: str = "json") -> list[Path]:
    """Write ``<name>.json`` (byte-stable) and ``<name>.timing.json``.

    ``csv_bundle`` additionally writes one ``<name>.<slice>.csv`` per
    recorded grid.
    """
    if fmt not in ("json", "csv_bundle"):
        raise ConfigError(f"unknown report format {fmt!r}")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        written = [out / f"{report.name}.json", out / f"{report.name}.timing.json"]
        written[0].write_text(report.to_json())
        written[1].write_text(json.dumps(report.timing_dict(), indent=2, sort_keys=True) + "\n")
        if fmt == "csv_bundle":
            for key in sorted(report.grids):
                p = out / f"{report.name}.{key}.csv"
                p.write_text(to_csv(report.grids[key]))
                written.append(p)
    except OSError as exc:
        raise OSError(f"cannot write report to {out}: {exc}") from exc
    return written
