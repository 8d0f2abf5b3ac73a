"""Synthetic road rasters used by the bundled scenarios and the tests."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

import numpy as np

from .worldmap import CellClass, GridMap, render, save_png

G, B = CellClass.GOOD_ROAD, CellClass.BAD_ROAD


def _hline(base: np.ndarray, y: int, x0: int, x1: int, cls: int, half: int = 1) -> None:
    base[y - half : y + half + 1, x0 : x1 + 1] = cls


def _vline(base: np.ndarray, x: int, y0: int, y1: int, cls: int, half: int = 1) -> None:
    base[y0 : y1 + 1, x - half : x + half + 1] = cls


def two_corridor(size: int = 256) -> GridMap:
    """Good-road corridor on top, bad-road corridor below, good-road links at both ends.

    Start and goal sit halfway down the left and right links
    (see :data:`TWO_CORRIDOR_ENDPOINTS`).
    """
    base = np.zeros((size, size), dtype=np.uint8)
    lo, hi = size // 16, size - size // 16
    top, bottom = size // 4, 3 * size // 4
    _hline(base, top, lo, hi, G)
    _hline(base, bottom, lo, hi, B)
    _vline(base, lo, top, bottom, G)
    _vline(base, hi, top, bottom, G)
    return GridMap.from_base(base)


TWO_CORRIDOR_ENDPOINTS = ((16, 128), (240, 128))
# Two discs sitting on the good corridor of the 256x256 map.
TWO_CORRIDOR_FIRES = (((96.0, 64.0), 8.0, 1.0), ((160.0, 64.0), 8.0, 1.0))


def ladder(width: int = 96, height: int = 64) -> GridMap:
    """Two good corridors joined at both ends, plus a bad-road rung in the middle.

    The upper corridor is the short way round from the default endpoints.
    """
    base = np.zeros((height, width), dtype=np.uint8)
    left, right = 4, width - 5
    upper, lower = height // 4, 3 * height // 4
    _hline(base, upper, left, right, G)
    _hline(base, lower, left, right, G)
    _vline(base, left, upper, lower, G)
    _vline(base, right, upper, lower, G)
    _vline(base, width // 2, upper + 2, lower - 2, B, half=0)
    return GridMap.from_base(base)


BUNDLED = {
    "two_fires": {
        "map": "ladder.png",
        "fires": [
            {"center": [50.0, 4.0], "radius": 2.0, "intensity": 1.0},
            {"center": [72.0, 3.0], "radius": 2.0, "intensity": 1.0},
        ],
        "weather": [
            {"from_tick": 0, "wind_direction": 90.0, "wind_speed": 0.3},
            {"from_tick": 45, "wind_direction": 270.0, "wind_speed": 0.3},
        ],
        "start": [4, 24],
        "goal": [91, 24],
        "fire_params": {"growth_rate": 0.1, "advect_gain": 0.5, "p_base": 0.15, "wind_bias": 0.5},
        "smoke_params": {"emission_rate": 4, "band": 2.0, "angular_spread": 45, "drift_gain": 1.0, "lifetime": 12},
        "cost_params": {"good": [1.0, 1.4], "bad": [100.0, 140.0]},
        "ticks": 250,
        "evacuee_speed": 1,
        "seed": 7,
    },
    "merging_fires": {
        "map": "ladder.png",
        "fires": [
            {"center": [30.0, 40.0], "radius": 3.0, "intensity": 1.0},
            {"center": [44.0, 40.0], "radius": 3.0, "intensity": 0.5},
            {"center": [70.0, 8.0], "radius": 2.0, "intensity": 1.0},
            {"center": [80.0, 56.0], "radius": 2.0, "intensity": 1.0},
        ],
        "weather": [{"from_tick": 0, "wind_direction": 0.0, "wind_speed": 0.5}],
        "start": [4, 24],
        "goal": [91, 24],
        "fire_params": {"growth_rate": 0.5, "advect_gain": 0.5, "p_base": 0.1, "wind_bias": 0.5},
        "smoke_params": {"emission_rate": 3, "band": 2.0, "angular_spread": 30, "drift_gain": 1.0, "lifetime": 8},
        "ticks": 20,
        "seed": 3,
    },
}


def write_bundled(out_dir: Union[str, Path]) -> None:
    """Regenerate the bundled maps and scenario files under ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_png(render(two_corridor()), out / "two_corridor.png")
    save_png(render(ladder()), out / "ladder.png")
    for name, doc in BUNDLED.items():
        (out / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")
