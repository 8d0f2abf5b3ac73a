import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from firescape.oracle import dijkstra_reference
from firescape.planner import (
    CostParams,
    HazardAtEndpoint,
    NoRouteFound,
    heuristic,
    path_cost,
    plan,
    step_cost,
)
from firescape.worldmap import CellClass, GridMap, MoveKind, Traversal, effective_class

from conftest import grid_from_rows, random_grid

P = CostParams()


def test_cost_params_defaults():
    assert P.good == (1.0, 1.4)
    assert P.bad == (100.0, 140.0)


@pytest.mark.parametrize("good, bad", [((0, 0), (1, 1)), ((1, 2.5), (1, 1)), ((2, 1), (1, 1))])
def test_cost_params_validation(good, bad):
    with pytest.raises(ValueError):
        CostParams(good, bad)


def test_step_costs():
    grid = grid_from_rows("GBF")
    assert step_cost(grid, P, (0, 0), MoveKind.DIAGONAL) == 1.4
    assert step_cost(grid, P, (0, 0), MoveKind.CARDINAL) == 1.0
    assert step_cost(grid, P, (1, 0), MoveKind.CARDINAL) == 100
    assert step_cost(grid, P, (1, 0), MoveKind.DIAGONAL) == 140
    assert step_cost(grid, P, (2, 0), MoveKind.CARDINAL) is None
    assert step_cost(grid, P, (2, 0), MoveKind.DIAGONAL) is None


def test_heuristic_examples():
    good = GridMap.from_base(np.full((10, 10), CellClass.GOOD_ROAD))
    bad = GridMap.from_base(np.full((10, 10), CellClass.BAD_ROAD))
    assert heuristic((2, 3), (7, 6), good, P) == pytest.approx(6.2, abs=1e-9)
    assert heuristic((2, 3), (7, 6), bad, P) == pytest.approx(620, abs=1e-9)
    assert heuristic((7, 6), (7, 6), bad, P) == 0


def test_plan_diagonal():
    grid = GridMap.from_base(np.full((3, 3), CellClass.GOOD_ROAD))
    r = plan(grid, P, (0, 0), (2, 2))
    assert r.path == [(0, 0), (1, 1), (2, 2)]
    assert r.total_cost == 2.8
    assert r.expanded >= 3


def test_plan_start_is_goal():
    r = plan(grid_from_rows("GG"), P, (1, 0), (1, 0))
    assert r.path == [(1, 0)] and r.total_cost == 0


def test_plan_bisected_map():
    grid = grid_from_rows(*["GGFGG"] * 5)
    with pytest.raises(NoRouteFound) as exc:
        plan(grid, P, (0, 0), (4, 4))
    assert exc.value.expanded == 10


@pytest.mark.parametrize("start, goal, which", [((0, 0), (2, 0), "goal"), ((2, 0), (0, 0), "start")])
def test_plan_hazard_endpoint(start, goal, which):
    grid = grid_from_rows("GGS")
    with pytest.raises(HazardAtEndpoint, match=f"{which} inside hazard"):
        plan(grid, P, start, goal)


def test_plan_background_endpoint():
    with pytest.raises(HazardAtEndpoint):
        plan(grid_from_rows("G.G"), P, (0, 0), (1, 0))


def test_plan_mixed_rows_matches_oracle():
    grid = grid_from_rows("GGGGG", "GGGGG", "BBBBB", "GGGGG", "GGGGG")
    r = plan(grid, P, (0, 0), (0, 4))
    ref = dijkstra_reference(grid, P, (0, 0), (0, 4))
    # any crossing of the bad row costs one bad step; oracle optimum is 4 + 99
    assert ref.total_cost == 103
    assert r.total_cost == ref.total_cost


def test_plan_prefers_long_good_detour():
    grid = grid_from_rows(
        "GGGGGGG",
        "G.....G",
        "GBBBBBG",
    )
    r = plan(grid, P, (0, 2), (6, 2))
    assert all(grid.base_at(c) == CellClass.GOOD_ROAD for c in r.path)


def test_corner_cutting_allowed():
    grid = grid_from_rows("GF", "FG")
    r = plan(grid, P, (0, 0), (1, 1))
    assert r.path == [(0, 0), (1, 1)]


def _check_path(grid, r, start, goal):
    assert r.path[0] == start and r.path[-1] == goal
    assert len(set(r.path)) == len(r.path)
    for a, b in zip(r.path, r.path[1:]):
        assert max(abs(a[0] - b[0]), abs(a[1] - b[1])) == 1
    for c in r.path:
        assert effective_class(grid, c) != Traversal.FORBIDDEN
    assert r.total_cost == path_cost(grid, P, r.path)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 16), st.integers(2, 16))
def test_plan_properties_random(seed, w, h):
    rng = np.random.default_rng(seed)
    grid = random_grid(rng, w, h, p_bad=0.3, p_block=0.15, p_hazard=0.15)
    start = (int(rng.integers(w)), int(rng.integers(h)))
    goal = (int(rng.integers(w)), int(rng.integers(h)))
    try:
        ref = dijkstra_reference(grid, P, start, goal)
    except (NoRouteFound, HazardAtEndpoint) as exc:
        with pytest.raises(type(exc)):
            plan(grid, P, start, goal)
        return
    r = plan(grid, P, start, goal)
    _check_path(grid, r, start, goal)
    assert r.total_cost >= ref.total_cost
    assert math.isfinite(r.total_cost)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 20), st.integers(2, 20))
def test_plan_optimal_on_good_only_maps(seed, w, h):
    rng = np.random.default_rng(seed)
    grid = random_grid(rng, w, h, p_bad=0.0, p_block=0.25)
    start, goal = (0, 0), (w - 1, h - 1)
    if effective_class(grid, start) == Traversal.FORBIDDEN or effective_class(grid, goal) == Traversal.FORBIDDEN:
        return
    try:
        ref = dijkstra_reference(grid, P, start, goal)
    except NoRouteFound:
        with pytest.raises(NoRouteFound):
            plan(grid, P, start, goal)
        return
    assert plan(grid, P, start, goal).total_cost == ref.total_cost


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([0.25, 0.5, 2.0, 8.0, 64.0]))
def test_plan_scaling(seed, k):
    # powers of two scale floats exactly, so every tie breaks the same way
    rng = np.random.default_rng(seed)
    grid = random_grid(rng, 12, 12, p_bad=0.3, p_block=0.1)
    start, goal = (0, 0), (11, 11)
    try:
        base = plan(grid, P, start, goal)
    except (NoRouteFound, HazardAtEndpoint):
        return
    scaled = plan(grid, P.scaled(k), start, goal)
    assert scaled.path == base.path
    assert scaled.total_cost == k * base.total_cost


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_hazards_never_decrease_cost(seed):
    rng = np.random.default_rng(seed)
    clean = random_grid(rng, 14, 14, p_bad=0.3, p_block=0.1)
    hazard = np.where(rng.random(clean.shape) < 0.15, rng.integers(1, 3, clean.shape), 0)
    start, goal = (0, 0), (13, 13)
    hazard[0, 0] = hazard[13, 13] = 0
    dirty = clean.with_hazard(hazard)
    # weighted A* is not optimal, so compare optima via the oracle and
    # check the planner itself stays at or above the clean optimum
    try:
        ref_clean = dijkstra_reference(clean, P, start, goal)
    except (NoRouteFound, HazardAtEndpoint):
        return
    try:
        ref_dirty = dijkstra_reference(dirty, P, start, goal)
    except NoRouteFound:
        return
    assert ref_dirty.total_cost >= ref_clean.total_cost
    assert plan(dirty, P, start, goal).total_cost >= ref_clean.total_cost


def test_plan_deterministic():
    rng = np.random.default_rng(4)
    grid = random_grid(rng, 30, 30, p_bad=0.4, p_block=0.1)
    a = plan(grid, P, (0, 0), (29, 29)) if grid.base[0, 0] and grid.base[29, 29] else None
    b = plan(grid, P, (0, 0), (29, 29)) if grid.base[0, 0] and grid.base[29, 29] else None
    assert a == b
