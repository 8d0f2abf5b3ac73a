"""Uniform-cost reference search used to check the planner.

Deliberately naive: no heuristic, a dict-of-labels Dijkstra written without
reference to the planner's frontier code. Only the step-cost function and the
error types are shared.
"""

from __future__ import annotations

import heapq
import math

from .planner import (
    CostParams,
    NoRouteFound,
    PlanResult,
    check_endpoints,
    path_cost,
    step_cost,
)
from .worldmap import Cell, GridMap, neighbors8


def dijkstra_reference(grid: GridMap, params: CostParams, start, goal) -> PlanResult:
    start, goal = Cell(*start), Cell(*goal)
    check_endpoints(grid, start, goal)
    if start == goal:
        return PlanResult([start], 0.0, 0)

    dist = {start: 0.0}
    prev = {start: None}
    done = set()
    heap = [(0.0, start.y, start.x)]
    expanded = 0
    while heap:
        d, y, x = heapq.heappop(heap)
        u = Cell(x, y)
        if u in done:
            continue
        done.add(u)
        expanded += 1
        if u == goal:
            break
        for v, kind in neighbors8(grid, u):
            c = step_cost(grid, params, v, kind)
            if c is None or v in done:
                continue
            nd = d + c
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                prev[v] = u
                heapq.heappush(heap, (nd, v.y, v.x))
    if goal not in done:
        raise NoRouteFound(expanded)

    path = [goal]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    path.reverse()
    return PlanResult(path, path_cost(grid, params, path), expanded)


def reachable(grid: GridMap, start) -> set[Cell]:
    """Cells connected to ``start`` through traversable cells (flood fill)."""
    start = Cell(*start)
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v, kind in neighbors8(grid, u):
            if v not in seen and step_cost(grid, CostParams(), v, kind) is not None:
                seen.add(v)
                stack.append(v)
    return seen
