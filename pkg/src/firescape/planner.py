"""Class-weighted A* over the 8-connected road raster.

Step costs and the diagonal-distance heuristic both take their
``(cardinal, diagonal)`` weights from the road class: good roads are cheap,
bad roads a hundred times dearer, and any cell under fire or smoke is off
limits. Because the heuristic uses the weights of the node being expanded,
it overestimates on bad-road cells and the search is a weighted A*: routes
are feasible and hazard-free but need not be optimal on mixed maps.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .worldmap import Cell, GridMap, MoveKind, Traversal, effective_class


class PlanningError(Exception):
    pass


class HazardAtEndpoint(PlanningError):
    def __init__(self, endpoint: str, cell):
        self.endpoint = endpoint
        self.cell = Cell(*cell)
        super().__init__(f"{endpoint} inside hazard")


class NoRouteFound(PlanningError):
    def __init__(self, expanded: int):
        self.expanded = expanded
        super().__init__(f"no route found after expanding {expanded} nodes")


@dataclass(frozen=True)
class CostParams:
    good: tuple[float, float] = (1.0, 1.4)
    bad: tuple[float, float] = (100.0, 140.0)

    def __post_init__(self):
        for name in ("good", "bad"):
            d1, d2 = (float(v) for v in getattr(self, name))
            if not d1 > 0:
                raise ValueError(f"{name}: cardinal weight must be positive")
            if not d1 <= d2 <= 2 * d1:
                raise ValueError(f"{name}: need d1 <= d2 <= 2*d1, got ({d1}, {d2})")
            object.__setattr__(self, name, (d1, d2))

    def pair(self, cls: Traversal) -> tuple[float, float]:
        if cls == Traversal.BAD_ROAD:
            return self.bad
        return self.good

    def scaled(self, k: float) -> "CostParams":
        return CostParams(tuple(k * v for v in self.good), tuple(k * v for v in self.bad))


@dataclass
class PlanResult:
    path: list[Cell]
    total_cost: float
    expanded: int = 0

    def to_dict(self) -> dict:
        return {
            "total_cost": self.total_cost,
            "path_length": len(self.path),
            "expanded": self.expanded,
            "path": [list(c) for c in self.path],
        }


def step_cost(grid: GridMap, params: CostParams, to, move: MoveKind) -> Optional[float]:
    """Cost of stepping onto ``to``; ``None`` means the cell is forbidden."""
    cls = effective_class(grid, to)
    if cls == Traversal.FORBIDDEN:
        return None
    return params.pair(cls)[int(move)]


def octile(dx: int, dy: int, d1: float, d2: float) -> float:
    return d1 * max(dx, dy) + (d2 - d1) * min(dx, dy)


def heuristic(n, goal, grid: GridMap, params: CostParams) -> float:
    d1, d2 = params.pair(effective_class(grid, n))
    return octile(abs(n[0] - goal[0]), abs(n[1] - goal[1]), d1, d2)


def step_costs(grid: GridMap, params: CostParams, path) -> list[float]:
    steps = []
    for a, b in zip(path, path[1:]):
        move = MoveKind.DIAGONAL if a[0] != b[0] and a[1] != b[1] else MoveKind.CARDINAL
        c = step_cost(grid, params, b, move)
        if c is None:
            raise ValueError(f"path crosses forbidden cell {tuple(b)}")
        steps.append(c)
    return steps


def path_cost(grid: GridMap, params: CostParams, path) -> float:
    """Sum of step costs along ``path``, exactly rounded so step order is irrelevant."""
    return math.fsum(step_costs(grid, params, path))


def check_endpoints(grid: GridMap, start, goal) -> None:
    for name, c in (("start", start), ("goal", goal)):
        if not grid.in_bounds(c):
            raise ValueError(f"{name} {tuple(c)} outside {grid.width}x{grid.height} map")
    if effective_class(grid, start) == Traversal.FORBIDDEN:
        raise HazardAtEndpoint("start", start)
    if effective_class(grid, goal) == Traversal.FORBIDDEN:
        raise HazardAtEndpoint("goal", goal)


_OFFSETS = tuple(
    (dx, dy, 1 if dx and dy else 0) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if dx or dy
)


def plan(grid: GridMap, params: CostParams, start, goal) -> PlanResult:
    """Best-first search on ``f = g + h``.

    Frontier ties break on smaller ``h``, then row-major cell order. Nodes
    are settled once and never reopened, so the first time the goal is
    popped its path is returned.
    """
    start, goal = Cell(*start), Cell(*goal)
    check_endpoints(grid, start, goal)
    if start == goal:
        return PlanResult([start], 0.0, 0)

    w, h = grid.width, grid.height
    cls = grid.traversal_grid().tolist()
    weights = {
        Traversal.GOOD_ROAD: params.good,
        Traversal.BAD_ROAD: params.bad,
    }
    gx, gy = goal

    def h_of(x: int, y: int) -> float:
        d1, d2 = weights[cls[y][x]]
        return octile(abs(x - gx), abs(y - gy), d1, d2)

    g = {start: 0.0}
    parent: dict[Cell, Optional[Cell]] = {start: None}
    closed: set[Cell] = set()
    h0 = h_of(*start)
    frontier = [(h0, h0, start.y, start.x)]
    expanded = 0
    while frontier:
        _, hn, y, x = heapq.heappop(frontier)
        node = Cell(x, y)
        if node in closed:
            continue
        closed.add(node)
        expanded += 1
        if node == goal:
            path = _unwind(parent, node)
            return PlanResult(path, path_cost(grid, params, path), expanded)
        gn = g[node]
        for dx, dy, diag in _OFFSETS:
            nx, ny = x + dx, y + dy
            if not (0 <= nx < w and 0 <= ny < h):
                continue
            ncls = cls[ny][nx]
            if ncls == Traversal.FORBIDDEN:
                continue
            nb = Cell(nx, ny)
            if nb in closed:
                continue
            cand = gn + weights[ncls][diag]
            if cand < g.get(nb, math.inf):
                g[nb] = cand
                parent[nb] = node
                hb = h_of(nx, ny)
                heapq.heappush(frontier, (cand + hb, hb, ny, nx))
    raise NoRouteFound(expanded)


def _unwind(parent: dict, node) -> list[Cell]:
    path = []
    while node is not None:
        path.append(node)
        node = parent[node]
    path.reverse()
    return path


def route_blocked(grid: GridMap, route) -> bool:
    """True if any cell of ``route`` is currently forbidden."""
    if not route:
        return False
    trav = grid.traversal_grid()
    xs, ys = zip(*route)
    return bool(np.any(trav[list(ys), list(xs)] == Traversal.FORBIDDEN))
