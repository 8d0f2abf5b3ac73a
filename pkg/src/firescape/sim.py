"""Tick loop: weather, fire, smoke, evacuee motion and replanning.

Hazards advance before the evacuee moves, and the evacuee never steps onto
a forbidden cell: it halts in front of one and the route is replanned from
where it stands.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from .fire import (
    FireParams,
    FireSource,
    Weather,
    advect_fire,
    grow_fire,
    ignite,
    merge_fires,
    rasterize_fire,
    spread_mask,
)
from .planner import (
    CostParams,
    HazardAtEndpoint,
    NoRouteFound,
    plan,
    route_blocked,
    step_cost,
    step_costs,
)
from .smoke import SmokeParams, SmokeParticle, advect_smoke, emit_smoke, rasterize_smoke, smoke_gray
from .worldmap import Cell, GridMap, Hazard, MoveKind, Traversal, effective_class, load_map, render, save_png

log = logging.getLogger(__name__)

ESCAPED = "Escaped"
TRAPPED = "Trapped"
OVERRUN = "Overrun"
TIMED_OUT = "TimedOut"


class ScenarioError(ValueError):
    """Invalid scenario; ``field`` is a dotted path to the offending entry."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


@dataclass
class Scenario:
    map: Union[str, Path, GridMap]
    start: Cell
    goal: Cell
    ticks: int
    fires: list[FireSource] = field(default_factory=list)
    weather: list[tuple[int, Weather]] = field(default_factory=lambda: [(0, Weather())])
    fire_params: FireParams = field(default_factory=FireParams)
    smoke_params: SmokeParams = field(default_factory=SmokeParams)
    cost_params: CostParams = field(default_factory=CostParams)
    evacuee_speed: int = 1
    seed: int = 0
    source_sha256: Optional[str] = None

    def __post_init__(self):
        self.start = Cell(*self.start)
        self.goal = Cell(*self.goal)
        self.validate()

    def validate(self) -> None:
        if not isinstance(self.ticks, int) or isinstance(self.ticks, bool) or self.ticks < 1:
            raise ScenarioError("ticks", f"must be an integer >= 1, got {self.ticks!r}")
        if not isinstance(self.evacuee_speed, int) or self.evacuee_speed < 1:
            raise ScenarioError("evacuee_speed", f"must be an integer >= 1, got {self.evacuee_speed!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ScenarioError("seed", f"must be an integer in [0, 2**64), got {self.seed!r}")
        if not self.weather:
            raise ScenarioError("weather", "schedule must not be empty")
        froms = [t for t, _ in self.weather]
        if froms[0] != 0:
            raise ScenarioError("weather[0].from_tick", "first entry must start at tick 0")
        for i, (a, b) in enumerate(zip(froms, froms[1:]), start=1):
            if b <= a:
                raise ScenarioError(f"weather[{i}].from_tick", "schedule must be strictly increasing")

    def weather_at(self, tick: int) -> Weather:
        current = self.weather[0][1]
        for start, w in self.weather:
            if start > tick:
                break
            current = w
        return current

    def load_grid(self) -> GridMap:
        if isinstance(self.map, GridMap):
            return self.map
        return load_map(self.map)

    def to_dict(self) -> dict:
        return {
            "map": str(self.map) if not isinstance(self.map, GridMap) else "<in-memory>",
            "fires": [
                {"center": list(f.center), "radius": f.radius, "intensity": f.intensity}
                for f in self.fires
            ],
            "weather": [
                {"from_tick": t, "wind_direction": w.wind_direction, "wind_speed": w.wind_speed}
                for t, w in self.weather
            ],
            "start": list(self.start),
            "goal": list(self.goal),
            "fire_params": asdict(self.fire_params),
            "smoke_params": asdict(self.smoke_params),
            "cost_params": {"good": list(self.cost_params.good), "bad": list(self.cost_params.bad)},
            "ticks": self.ticks,
            "evacuee_speed": self.evacuee_speed,
            "seed": self.seed,
        }

    def fingerprint(self) -> str:
        if self.source_sha256:
            return self.source_sha256
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()


# Scenario file parsing --------------------------------------------------------

_FIELDS = {
    "map", "fires", "weather", "start", "goal", "fire_params", "smoke_params",
    "cost_params", "ticks", "evacuee_speed", "seed",
}


def _expect(cond: bool, path: str, msg: str) -> None:
    if not cond:
        raise ScenarioError(path, msg)


def _number(value: Any, path: str) -> float:
    _expect(isinstance(value, (int, float)) and not isinstance(value, bool), path, "expected a number")
    return float(value)


def _cell(value: Any, path: str) -> Cell:
    _expect(
        isinstance(value, list) and len(value) == 2
        and all(isinstance(v, int) and not isinstance(v, bool) for v in value),
        path, "expected [x, y] integers",
    )
    return Cell(*value)


def _params(cls, raw: Any, path: str):
    if raw is None:
        return cls()
    _expect(isinstance(raw, dict), path, "expected an object")
    names = set(cls.__dataclass_fields__)
    for key, value in raw.items():
        _expect(key in names, f"{path}.{key}", "unknown field")
        _number(value, f"{path}.{key}")
    try:
        return cls(**raw)
    except ValueError as exc:
        raise ScenarioError(path, str(exc)) from None


def parse_scenario(data: Any, base_dir: Union[str, Path] = ".") -> Scenario:
    """Validate a decoded scenario document and build a :class:`Scenario`.

    The map path is resolved against ``base_dir``.
    """
    _expect(isinstance(data, dict), "$", "scenario must be a JSON object")
    for key in data:
        _expect(key in _FIELDS, key, "unknown field")
    for key in ("map", "start", "goal", "ticks"):
        _expect(key in data, key, "required field missing")

    _expect(isinstance(data["map"], str), "map", "expected a file path")
    map_path = Path(base_dir) / data["map"]

    fires = []
    raw_fires = data.get("fires", [])
    _expect(isinstance(raw_fires, list), "fires", "expected a list")
    for i, raw in enumerate(raw_fires):
        p = f"fires[{i}]"
        _expect(isinstance(raw, dict), p, "expected an object")
        center = raw.get("center")
        _expect(isinstance(center, list) and len(center) == 2, f"{p}.center", "expected [x, y]")
        cx, cy = (_number(v, f"{p}.center") for v in center)
        radius = _number(raw.get("radius"), f"{p}.radius")
        _expect(radius > 0, f"{p}.radius", "must be positive")
        intensity = _number(raw.get("intensity", 1.0), f"{p}.intensity")
        _expect(intensity >= 0, f"{p}.intensity", "must be >= 0")
        fires.append(FireSource((cx, cy), radius, intensity))

    weather = []
    raw_weather = data.get("weather", [{"from_tick": 0}])
    _expect(isinstance(raw_weather, list), "weather", "expected a list")
    for i, raw in enumerate(raw_weather):
        p = f"weather[{i}]"
        _expect(isinstance(raw, dict), p, "expected an object")
        start = raw.get("from_tick")
        _expect(isinstance(start, int) and not isinstance(start, bool), f"{p}.from_tick", "expected an integer")
        direction = _number(raw.get("wind_direction", 0.0), f"{p}.wind_direction")
        speed = _number(raw.get("wind_speed", 0.0), f"{p}.wind_speed")
        _expect(speed >= 0, f"{p}.wind_speed", "must be >= 0")
        weather.append((start, Weather(direction, speed)))

    cost = data.get("cost_params")
    if cost is None:
        cost_params = CostParams()
    else:
        _expect(isinstance(cost, dict), "cost_params", "expected an object")
        pairs = {}
        for key in cost:
            _expect(key in ("good", "bad"), f"cost_params.{key}", "unknown field")
            pair = cost[key]
            _expect(isinstance(pair, list) and len(pair) == 2, f"cost_params.{key}", "expected [d1, d2]")
            pairs[key] = tuple(_number(v, f"cost_params.{key}") for v in pair)
        try:
            cost_params = CostParams(**pairs)
        except ValueError as exc:
            raise ScenarioError("cost_params", str(exc)) from None

    return Scenario(
        map=map_path,
        start=_cell(data["start"], "start"),
        goal=_cell(data["goal"], "goal"),
        ticks=data["ticks"],
        fires=fires,
        weather=weather,
        fire_params=_params(FireParams, data.get("fire_params"), "fire_params"),
        smoke_params=_params(SmokeParams, data.get("smoke_params"), "smoke_params"),
        cost_params=cost_params,
        evacuee_speed=data.get("evacuee_speed", 1),
        seed=data.get("seed", 0),
    )


def load_scenario(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    raw = path.read_bytes()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ScenarioError("$", f"malformed JSON: {exc}") from None
    scenario = parse_scenario(data, path.parent)
    scenario.source_sha256 = hashlib.sha256(raw).hexdigest()
    return scenario


# Simulation -------------------------------------------------------------------


@dataclass
class TickRecord:
    tick: int
    fire_cells: int
    smoke_cells: int
    replanned: bool
    route_cost: Optional[float]


@dataclass
class RouteRecord:
    tick: int
    origin: Cell
    path: list[Cell]
    total_cost: float


@dataclass
class SimState:
    grid: GridMap
    fires: list[FireSource]
    particles: list[SmokeParticle]
    position: Cell
    route: Optional[list[Cell]]
    walked: list[float] = field(default_factory=list)
    tick: int = 0
    outcome: Optional[str] = None
    replanned: bool = False

    @property
    def done(self) -> bool:
        return self.outcome is not None

    def journey_cost(self, scenario: Scenario) -> Optional[float]:
        """Cost already walked plus the cost of the remaining planned route."""
        if self.route is None:
            return None
        ahead = step_costs(self.grid, scenario.cost_params, self.route)
        return math.fsum(self.walked + ahead)


@dataclass
class SimReport:
    scenario_sha256: str
    seed: int
    outcome: str
    outcome_tick: int
    final_cost: Optional[float]
    records: list[TickRecord]
    routes: list[RouteRecord]
    final_fires: list[FireSource]

    @property
    def replans(self) -> int:
        return sum(r.replanned for r in self.records)

    def to_dict(self) -> dict:
        return {
            "scenario_sha256": self.scenario_sha256,
            "seed": self.seed,
            "outcome": {"kind": self.outcome, "tick": self.outcome_tick},
            "final_cost": self.final_cost,
            "replans": self.replans,
            "ticks": [asdict(r) for r in self.records],
            "routes": [
                {
                    "tick": r.tick,
                    "origin": list(r.origin),
                    "total_cost": r.total_cost,
                    "path": [list(c) for c in r.path],
                }
                for r in self.routes
            ],
            "final_fires": [
                {"center": list(f.center), "radius": f.radius, "intensity": f.intensity}
                for f in self.final_fires
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["tick", "fire_cells", "smoke_cells", "replanned", "route_cost"])
        for r in self.records:
            cost = "" if r.route_cost is None else repr(r.route_cost)
            writer.writerow([r.tick, r.fire_cells, r.smoke_cells, int(r.replanned), cost])
        return buf.getvalue()


def _replan(state: SimState, scenario: Scenario, routes: list[RouteRecord]) -> None:
    try:
        result = plan(state.grid, scenario.cost_params, state.position, scenario.goal)
    except (NoRouteFound, HazardAtEndpoint) as exc:
        log.info("tick %d: trapped at %s (%s)", state.tick, tuple(state.position), exc)
        state.route = None
        state.outcome = TRAPPED
        return
    state.route = result.path
    routes.append(RouteRecord(state.tick, state.position, result.path, result.total_cost))


def initial_state(scenario: Scenario, grid: Optional[GridMap] = None) -> SimState:
    grid = scenario.load_grid() if grid is None else grid
    for name, c in (("start", scenario.start), ("goal", scenario.goal)):
        if not grid.in_bounds(c):
            raise ScenarioError(name, f"{tuple(c)} outside {grid.width}x{grid.height} map")
    fires = merge_fires(scenario.fires)
    grid = rasterize_fire(fires, grid)
    return SimState(grid=grid, fires=fires, particles=[], position=scenario.start, route=None)


def _move(state: SimState, scenario: Scenario) -> None:
    for _ in range(scenario.evacuee_speed):
        if state.route is None or len(state.route) < 2:
            return
        nxt = state.route[1]
        here = state.route[0]
        kind = MoveKind.DIAGONAL if nxt.x != here.x and nxt.y != here.y else MoveKind.CARDINAL
        cost = step_cost(state.grid, scenario.cost_params, nxt, kind)
        if cost is None:
            return
        state.walked.append(cost)
        state.position = nxt
        state.route = state.route[1:]


def tick(state: SimState, scenario: Scenario, rng: np.random.Generator, routes: list[RouteRecord]) -> SimState:
    """Advance one tick in place and return ``state``."""
    if state.done:
        raise RuntimeError("simulation already finished")
    state.tick += 1
    state.replanned = False
    w = scenario.weather_at(state.tick)
    fp, sp = scenario.fire_params, scenario.smoke_params

    fires = [grow_fire(advect_fire(f, w, 1, fp), fp, 1) for f in state.fires]
    fires = merge_fires(fires)
    ignited = set()
    for f in fires:
        ignited |= spread_mask(f, state.grid, w, fp, rng)
    grid = ignite(state.grid, sorted(ignited))
    grid = rasterize_fire(fires, grid)

    particles = advect_smoke(state.particles, w, sp, 1)
    for f in fires:
        particles.extend(emit_smoke(f, sp, w, rng))
    grid = rasterize_smoke(particles, grid)
    state.grid, state.fires, state.particles = grid, fires, particles

    if effective_class(grid, state.position) == Traversal.FORBIDDEN:
        state.outcome = OVERRUN
        return state

    _move(state, scenario)
    if state.position == scenario.goal:
        state.outcome = ESCAPED
        return state

    if state.route is None or route_blocked(grid, state.route[1:]):
        state.replanned = True
        _replan(state, scenario, routes)
    return state


def _frame(state: SimState, scenario: Scenario) -> np.ndarray:
    shade = smoke_gray(state.particles, state.grid.shape)
    return render(state.grid, state.route, state.position, scenario.goal, smoke_gray=shade)


def iterate(scenario: Scenario, grid: Optional[GridMap] = None):
    """Yield ``(state, routes)`` after set-up and after every tick.

    ``state`` is the live simulation state (mutated between yields);
    ``routes`` lists only the routes planned during that step.
    """
    rng = np.random.default_rng(scenario.seed)
    state = initial_state(scenario, grid)
    routes: list[RouteRecord] = []
    if effective_class(state.grid, state.position) == Traversal.FORBIDDEN:
        state.outcome = OVERRUN
    elif state.position == scenario.goal:
        state.route = [state.position]
        state.outcome = ESCAPED
    else:
        _replan(state, scenario, routes)
    yield state, routes
    while not state.done and state.tick < scenario.ticks:
        routes = []
        tick(state, scenario, rng, routes)
        yield state, routes


def run(scenario: Scenario, frames: bool = False, grid: Optional[GridMap] = None):
    """Run ``scenario`` to a terminal outcome or its tick limit.

    Returns ``(report, frame_list)``; ``frame_list`` is empty unless
    ``frames`` is set.
    """
    records: list[TickRecord] = []
    routes: list[RouteRecord] = []
    images: list[np.ndarray] = []
    for state, new_routes in iterate(scenario, grid):
        routes.extend(new_routes)
        records.append(_record(state, scenario))
        if frames:
            images.append(_frame(state, scenario))

    report = SimReport(
        scenario_sha256=scenario.fingerprint(),
        seed=scenario.seed,
        outcome=state.outcome or TIMED_OUT,
        outcome_tick=state.tick,
        final_cost=records[-1].route_cost,
        records=records,
        routes=routes,
        final_fires=list(state.fires),
    )
    return report, images


def _record(state: SimState, scenario: Scenario) -> TickRecord:
    cost = state.journey_cost(scenario) if state.outcome != OVERRUN else None
    return TickRecord(
        tick=state.tick,
        fire_cells=state.grid.count(Hazard.FIRE),
        smoke_cells=state.grid.count(Hazard.SMOKE),
        replanned=state.replanned,
        route_cost=cost,
    )


def write_outputs(report: SimReport, images: list[np.ndarray], out_dir: Union[str, Path]) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json())
    (out / "ticks.csv").write_text(report.to_csv())
    for i, img in enumerate(images):
        save_png(img, out / f"frame_{i:05d}.png")


def stamp_hazards(
    grid: GridMap,
    fires: list[FireSource],
    weather: Weather,
    rng: np.random.Generator,
    smoke_params: SmokeParams = SmokeParams(),
) -> tuple[GridMap, list[SmokeParticle]]:
    """Burn the given fire discs into ``grid`` and add one burst of smoke."""
    fires = merge_fires(fires)
    grid = rasterize_fire(fires, grid)
    particles: list[SmokeParticle] = []
    for f in fires:
        particles.extend(emit_smoke(f, smoke_params, weather, rng))
    return rasterize_smoke(particles, grid), particles
