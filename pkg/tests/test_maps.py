import json

import numpy as np

from firescape.maps import BUNDLED, TWO_CORRIDOR_ENDPOINTS, ladder, two_corridor, write_bundled
from firescape.planner import CostParams, plan
from firescape.worldmap import CellClass, load_map

from conftest import SCENARIOS


def test_bundled_files_match_generators(tmp_path):
    write_bundled(tmp_path)
    for path in tmp_path.iterdir():
        bundled = SCENARIOS / path.name
        if path.suffix == ".png":
            assert np.array_equal(load_map(path).base, load_map(bundled).base), path.name
        else:
            assert json.loads(path.read_text()) == json.loads(bundled.read_text()), path.name
    assert {f"{name}.json" for name in BUNDLED} <= {p.name for p in SCENARIOS.iterdir()}


def test_two_corridor_layout():
    grid = two_corridor()
    start, goal = TWO_CORRIDOR_ENDPOINTS
    assert grid.base_at(start) == grid.base_at(goal) == CellClass.GOOD_ROAD
    assert np.count_nonzero(grid.base == CellClass.BAD_ROAD) > 0
    r = plan(grid, CostParams(), start, goal)
    assert all(grid.base_at(c) == CellClass.GOOD_ROAD for c in r.path)


def test_ladder_upper_corridor_is_shorter():
    grid = ladder()
    r = plan(grid, CostParams(), (4, 24), (91, 24))
    assert max(c.y for c in r.path) <= 24
