"""Command-line front end.

Exit codes: 0 success, 2 usage or bad scenario, 3 planning failure,
4 map I/O, 5 validation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .fire import FireSource, Weather
from .planner import CostParams, HazardAtEndpoint, NoRouteFound, plan
from .sim import ScenarioError, load_scenario, run, stamp_hazards, write_outputs
from .smoke import smoke_gray
from .worldmap import ClassificationError, MapFormatError, legend_histogram, load_map, render, save_png

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PLAN = 3
EXIT_IO = 4
EXIT_INVALID = 5

COORDS_HELP = "Coordinates are X,Y = column,row with the origin at the top-left pixel."


class UsageError(Exception):
    pass


def _ints(text: str, n: int, what: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"{what} must be {n} comma-separated integers") from None
    if len(vals) != n:
        raise argparse.ArgumentTypeError(f"{what} must be {n} comma-separated integers")
    return vals


def _floats(text: str, n: int, what: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"{what} must be {n} comma-separated numbers") from None
    if len(vals) != n:
        raise argparse.ArgumentTypeError(f"{what} must be {n} comma-separated numbers")
    return vals


def _cell(text: str):
    return _ints(text, 2, "cell")


def _fire(text: str) -> FireSource:
    cx, cy, r, intensity = _floats(text, 4, "--fires")
    try:
        return FireSource((cx, cy), r, intensity)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _wind(text: str) -> Weather:
    deg, speed = _floats(text, 2, "--wind")
    try:
        return Weather(deg, speed)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="firescape",
        description="Wildfire escape-route planning on classified road rasters. " + COORDS_HELP,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="plan one route on a map snapshot", description=COORDS_HELP)
    p.add_argument("--map", required=True, type=Path)
    p.add_argument("--start", required=True, type=_cell, metavar="X,Y")
    p.add_argument("--goal", required=True, type=_cell, metavar="X,Y")
    p.add_argument("--fires", action="append", type=_fire, default=[], metavar="CX,CY,R,INTENSITY")
    p.add_argument("--wind", type=_wind, default=Weather(), metavar="DEG,SPEED")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, help="route overlay PNG")
    p.add_argument("--report", type=Path, help="JSON report path")

    s = sub.add_parser("simulate", help="run a scenario file", description=COORDS_HELP)
    s.add_argument("--scenario", required=True, type=Path)
    s.add_argument("--out", required=True, type=Path, help="output directory")
    s.add_argument("--frames", action="store_true", help="write frame_%%05d.png per tick")
    s.add_argument("--seed", type=int, help="override the scenario seed")

    v = sub.add_parser("validate", help="check a map or scenario file")
    group = v.add_mutually_exclusive_group(required=True)
    group.add_argument("--map", type=Path)
    group.add_argument("--scenario", type=Path)

    o = sub.add_parser("oracle", help="compare the planner with the reference search")
    o.add_argument("--map", required=True, type=Path)
    o.add_argument("--start", required=True, type=_cell, metavar="X,Y")
    o.add_argument("--goal", required=True, type=_cell, metavar="X,Y")
    return parser


def _err(msg: str) -> None:
    print(f"firescape: {msg}", file=sys.stderr)


def _load(path: Path):
    try:
        return load_map(path)
    except (OSError, MapFormatError, ClassificationError) as exc:
        raise _IOFailure(f"cannot load map {path}: {exc}") from exc


class _IOFailure(Exception):
    pass


def cmd_plan(args) -> int:
    grid = _load(args.map)
    for name, c in (("start", args.start), ("goal", args.goal)):
        if not grid.in_bounds(c):
            raise UsageError(f"{name} {c} outside {grid.width}x{grid.height} map")
    rng = np.random.default_rng(args.seed)
    grid, particles = stamp_hazards(grid, args.fires, args.wind, rng)
    try:
        result = plan(grid, CostParams(), args.start, args.goal)
    except HazardAtEndpoint as exc:
        _err(str(exc))
        return EXIT_PLAN
    except NoRouteFound as exc:
        _err(f"no route found ({exc.expanded} nodes expanded)")
        return EXIT_PLAN
    if args.out:
        img = render(grid, result.path, args.start, args.goal, smoke_gray=smoke_gray(particles, grid.shape))
        save_png(img, args.out)
    if args.report:
        args.report.write_text(json.dumps(result.to_dict(), sort_keys=True) + "\n")
    print(f"{result.total_cost:.10g}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except FileNotFoundError as exc:
        raise _IOFailure(f"cannot read scenario: {exc}") from exc
    if args.seed is not None:
        scenario.seed = args.seed
        scenario.validate()
    try:
        grid = scenario.load_grid()
    except (OSError, MapFormatError, ClassificationError) as exc:
        raise _IOFailure(f"cannot load map {scenario.map}: {exc}") from exc
    report, frames = run(scenario, frames=args.frames, grid=grid)
    try:
        write_outputs(report, frames, args.out)
    except OSError as exc:
        raise _IOFailure(f"cannot write outputs: {exc}") from exc
    cost = "none" if report.final_cost is None else f"{report.final_cost:.10g}"
    print(f"outcome={report.outcome} final_cost={cost}")
    return EXIT_OK


def cmd_validate(args) -> int:
    if args.scenario is not None:
        try:
            scenario = load_scenario(args.scenario)
            grid = scenario.load_grid()
            for name in ("start", "goal"):
                c = getattr(scenario, name)
                if not grid.in_bounds(c):
                    raise ScenarioError(name, f"{tuple(c)} outside {grid.width}x{grid.height} map")
        except ScenarioError as exc:
            print(f"invalid: {exc}")
            return EXIT_INVALID
        except (OSError, MapFormatError, ClassificationError) as exc:
            print(f"invalid: map: {exc}")
            return EXIT_INVALID
        print(f"ok: scenario {args.scenario} ({grid.width}x{grid.height} map, {scenario.ticks} ticks)")
        return EXIT_OK

    from PIL import Image

    try:
        with Image.open(args.map) as im:
            rgb = np.asarray(im.convert("RGB"))
    except OSError as exc:
        raise _IOFailure(f"cannot load map {args.map}: {exc}") from exc
    counts, offenders = legend_histogram(rgb)
    for name, n in counts.items():
        print(f"{name.lower()}: {n}")
    if offenders:
        print(f"invalid: {len(offenders)} unclassifiable pixel(s)")
        for cell, color in offenders[:10]:
            print(f"  ({cell.x},{cell.y}) rgb={color}")
        return EXIT_INVALID
    return EXIT_OK


def cmd_oracle(args) -> int:
    from .oracle import dijkstra_reference

    grid = _load(args.map)
    out = {}
    for name, fn in (("plan", plan), ("oracle", dijkstra_reference)):
        try:
            r = fn(grid, CostParams(), args.start, args.goal)
            out[name] = {"total_cost": r.total_cost, "expanded": r.expanded, "path_length": len(r.path)}
        except (NoRouteFound, HazardAtEndpoint) as exc:
            out[name] = {"error": str(exc)}
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK


COMMANDS = {
    "plan": cmd_plan,
    "simulate": cmd_simulate,
    "validate": cmd_validate,
    "oracle": cmd_oracle,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except ScenarioError as exc:
        _err(f"bad scenario: {exc}")
        return EXIT_USAGE
    except _IOFailure as exc:
        _err(str(exc))
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
