"""Command-line entry point.

Exit status: 0 when every verdict passes, 1 when one fails, 2 for
configuration errors (including unknown subcommands).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from roughhj.errors import ConfigError, ContractError, DomainError
from roughhj.game_oracle import (
    GameConfig,
    PiecewiseConstant,
    constant,
    delta_eps,
    dp_value,
    payoff,
    simulate,
)
from roughhj.hamiltonian import by_name
from roughhj.lab.config import NAMES, load_config
from roughhj.lab.experiments import run_many
from roughhj.lab.report import emit_report
from roughhj.pde.grid import Grid, GridFunction, write_csv
from roughhj.pde.initial import abs_diff, ic_paper
from roughhj.pde.solver import SolveConfig, evolve, point_key, sized_grid
from roughhj.signal import parse_path, path_to_spec, theorem_bound, total_variation

__all__ = ["main", "build_parser"]


def _floats(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="roughhj", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", metavar="{solve,game,experiment,bound}")
    sub.required = True

    b = sub.add_parser("bound", help="evaluate the partition lower bound for a path")
    b.add_argument("--path", required=True, help="zigzag:A,N,T | brownian:SEED,STEPS,T,SCALE | knots:t,v,...")
    b.add_argument("--R", type=float, required=True)
    b.add_argument("--max-interior", type=int, default=20)
    b.add_argument("--midpoints", action="store_true")

    s = sub.add_parser("solve", help="evolve initial data along a path")
    s.add_argument("--config", type=Path, help="JSON file with defaults for these flags")
    s.add_argument("--path", default="zigzag:1,4,1")
    s.add_argument("--hamiltonian", default="paper_saddle")
    s.add_argument("--initial", choices=("ic_paper", "abs_diff"), default="ic_paper")
    s.add_argument("--R", type=float, default=1.0)
    s.add_argument("--dx", type=float, default=0.02)
    s.add_argument("--L", type=float, default=None)
    s.add_argument("--engine", choices=("morphological", "lax_friedrichs"), default="morphological")
    s.add_argument("--m", type=int, default=64)
    s.add_argument("--cfl", type=float, default=None)
    s.add_argument("--ordering", choices=("erode_first", "dilate_first"), default="erode_first")
    s.add_argument("--point", type=_floats, action="append", default=None)
    s.add_argument("--out", type=Path, default=None, help="directory for report.json and final.csv")

    g = sub.add_parser("game", help="game value by dynamic programming, or one simulated play")
    g.add_argument("--path", default="zigzag:1,4,1")
    g.add_argument("--R", type=float, default=1.0)
    g.add_argument("--dx", type=float, default=0.05)
    g.add_argument("--L", type=float, default=None)
    g.add_argument("--levels", type=int, default=3)
    g.add_argument("--substeps", type=int, default=None)
    g.add_argument("--simulate", action="store_true", help="simulate a play instead of the DP")
    g.add_argument("--strategy", default="delta_eps:0.1", help="delta_eps:EPS or constant:A")
    g.add_argument("--beta", type=_floats, default=[1.0], help="piecewise-constant beta on equal pieces")
    g.add_argument("--out", type=Path, default=None)

    e = sub.add_parser("experiment", help="run a named experiment and emit its report")
    e.add_argument("name", choices=NAMES + ("all",))
    e.add_argument("--config", type=Path, default=None)
    e.add_argument("--out", type=Path, default=None)
    e.add_argument("--format", choices=("json", "csv_bundle"), default="json")
    e.add_argument("--path", default=None, help="override the path (shorthand or JSON)")
    e.add_argument("--R", type=float, default=None)
    e.add_argument("--epsilon", type=float, default=None)
    e.add_argument("--ladder", type=_floats, default=None)
    e.add_argument("--m", type=int, default=None)
    e.add_argument("--vacuous-pass", action="store_true", help="pass when the bound is 0")
    e.add_argument("--jobs", type=int, default=1, help="run independent experiments concurrently")
    return ap


def _cmd_bound(args) -> int:
    path = parse_path(args.path)
    print(f"{theorem_bound(path, args.R, max_interior=args.max_interior, refine_midpoints=args.midpoints):.12g}")
    return 0


def _apply_json_defaults(args, parser_defaults: dict) -> None:
    data = json.loads(args.config.read_text())
    for key, value in data.items():
        key = key.replace("-", "_")
        if key in parser_defaults and getattr(args, key) == parser_defaults[key]:
            setattr(args, key, value)


def _cmd_solve(args) -> int:
    H = by_name(args.hamiltonian)
    path = parse_path(args.path)
    cfg = SolveConfig(engine=args.engine, cfl=args.cfl, m=args.m, ordering=args.ordering)
    points = args.point or [[0.0] * H.dim]
    radius = max(max(abs(c) for c in p) for p in points)
    if args.L is not None:
        grid = Grid(H.dim, args.L, args.dx)
    else:
        grid = sized_grid(path, H, cfg, args.dx, radius)
        if args.initial == "ic_paper" and grid.half_width < args.R:
            grid = Grid(H.dim, math.ceil(args.R / args.dx) * args.dx, args.dx)
    if args.initial == "ic_paper":
        f0 = ic_paper(grid, args.R)
    elif H.dim == 2:
        f0 = abs_diff(grid)
    else:
        f0 = GridFunction.from_function(grid, abs)
    rep = evolve(f0, path, H, cfg, observe_radius=radius)
    for p in points:
        rep.values[point_key(p)] = rep.final.at(p)
    print(rep.to_json())
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "report.json").write_text(rep.to_json() + "\n")
        write_csv(rep.final, args.out / "final.csv")
    return 0


def _strategy(text: str):
    kind, _, val = text.partition(":")
    try:
        if kind == "delta_eps":
            return delta_eps(float(val))
        if kind == "constant":
            return constant(float(val))
    except ValueError:
        pass
    raise ConfigError(f"bad strategy {text!r}; use delta_eps:EPS or constant:A")


def _cmd_game(args) -> int:
    path = parse_path(args.path)
    if args.simulate:
        beta = PiecewiseConstant.uniform(args.beta, path.T)
        traj = simulate(path, _strategy(args.strategy), beta)
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / "trajectory.csv").write_text(traj.to_csv())
        print(json.dumps({"x_T": traj.final[0], "y_T": traj.final[1], "tau": traj.tau,
                          "payoff": payoff(traj, args.R)}, indent=2))
        return 0
    L = args.L if args.L is not None else max(total_variation(path) + 3 * args.dx, args.R + args.dx)
    grid = Grid(2, L, args.dx)
    table = dp_value(path, GameConfig(grid, ic_paper(grid, args.R), args.substeps, args.levels))
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        write_csv(table.initial, args.out / "value_t0.csv")
    print(json.dumps({"value_origin": table.value_at((0.0, 0.0)), "dx": args.dx, "L": grid.half_width}, indent=2))
    return 0


def _cmd_experiment(args) -> int:
    overrides: dict = {}
    if args.path is not None:
        overrides["path"] = path_to_spec(parse_path(args.path))
    for key in ("R", "epsilon", "ladder"):
        if getattr(args, key) is not None:
            overrides[key] = getattr(args, key)
    if args.m is not None:
        overrides["engine"] = {"m": args.m}
    if args.vacuous_pass:
        overrides["vacuous_pass"] = True
    names = NAMES if args.name == "all" else (args.name,)
    # a config file names one experiment, so "all" runs on defaults
    source = args.config if args.name != "all" else None
    specs = [load_config(source, name, overrides) for name in names]
    reports = run_many(specs, jobs=args.jobs)
    ok = True
    for spec, rep in zip(specs, reports):
        for line in rep.summary_lines():
            print(line)
        out = args.out or spec.params.get("out")
        if out is not None:
            emit_report(rep, out, args.format)
        ok &= rep.passed
    return 0 if ok else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "bound":
            return _cmd_bound(args)
        if args.command == "solve":
            if args.config is not None:
                _apply_json_defaults(args, vars(parser.parse_args(["solve"])))
            return _cmd_solve(args)
        if args.command == "game":
            return _cmd_game(args)
        return _cmd_experiment(args)
    except (ConfigError, DomainError, ContractError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
