"""Dynamic fire model.

Each source is a disc that drifts with the wind, grows every tick, ignites
road cells just outside its rim at random, and merges with any disc it
touches. Cell ``(x, y)`` is treated as a point at ``(x, y)`` for distance
tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .worldmap import Cell, CellClass, GridMap, Hazard

SPREAD_REACH = 1.5
MAX_INTENSITY_FACTOR = 2.0


@dataclass(frozen=True)
class FireSource:
    center: tuple[float, float]
    radius: float
    intensity: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        if not self.radius > 0:
            raise ValueError(f"fire radius must be positive, got {self.radius}")
        if self.intensity < 0:
            raise ValueError(f"fire intensity must be >= 0, got {self.intensity}")

    def contains_disc(self, other: "FireSource", eps: float = 1e-9) -> bool:
        d = math.dist(self.center, other.center)
        return d + other.radius <= self.radius + eps


@dataclass(frozen=True)
class Weather:
    """Wind in image coordinates: 0 deg points to +x, 90 deg to +y (down)."""

    wind_direction: float = 0.0
    wind_speed: float = 0.0

    def __post_init__(self):
        if self.wind_speed < 0:
            raise ValueError(f"wind_speed must be >= 0, got {self.wind_speed}")
        object.__setattr__(self, "wind_direction", float(self.wind_direction) % 360.0)

    @property
    def unit(self) -> tuple[float, float]:
        theta = math.radians(self.wind_direction)
        return math.cos(theta), math.sin(theta)


@dataclass(frozen=True)
class FireParams:
    growth_rate: float = 1.0
    advect_gain: float = 0.5
    p_base: float = 0.15
    wind_bias: float = 0.5

    def __post_init__(self):
        for name in ("growth_rate", "advect_gain", "p_base", "wind_bias"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.p_base > 1 or self.wind_bias > 1:
            raise ValueError("p_base and wind_bias must lie in [0, 1]")


def advect_fire(f: FireSource, w: Weather, dt: float = 1.0, p: FireParams = FireParams()) -> FireSource:
    if dt < 0:
        raise ValueError("dt must be >= 0")
    ux, uy = w.unit
    step = p.advect_gain * w.wind_speed * dt
    return replace(f, center=(f.center[0] + step * ux, f.center[1] + step * uy))


def grow_fire(f: FireSource, p: FireParams, dt: float = 1.0) -> FireSource:
    if dt < 0:
        raise ValueError("dt must be >= 0")
    return replace(f, radius=f.radius + p.growth_rate * dt)


def _disc_window(grid: GridMap, center, reach: float):
    """Integer coordinate grids covering the bounding box of a disc, clipped."""
    cx, cy = center
    x0 = max(0, math.floor(cx - reach))
    x1 = min(grid.width - 1, math.ceil(cx + reach))
    y0 = max(0, math.floor(cy - reach))
    y1 = min(grid.height - 1, math.ceil(cy + reach))
    if x0 > x1 or y0 > y1:
        return None
    ys, xs = np.mgrid[y0 : y1 + 1, x0 : x1 + 1]
    return xs, ys


def spread_candidates(f: FireSource, grid: GridMap) -> list[Cell]:
    """Road cells in the ring ``radius < dist <= radius + 1.5``, row-major."""
    win = _disc_window(grid, f.center, f.radius + SPREAD_REACH)
    if win is None:
        return []
    xs, ys = win
    dist = np.hypot(xs - f.center[0], ys - f.center[1])
    base = grid.base[ys, xs]
    keep = (dist > f.radius) & (dist <= f.radius + SPREAD_REACH) & (base != CellClass.BACKGROUND)
    return [Cell(int(x), int(y)) for x, y in zip(xs[keep], ys[keep])]


def spread_probabilities(f: FireSource, cells: Sequence[Cell], w: Weather, p: FireParams) -> np.ndarray:
    if not cells:
        return np.zeros(0)
    pts = np.asarray(cells, dtype=np.float64)
    off = pts - np.asarray(f.center)
    if w.wind_speed > 0:
        norm = np.hypot(off[:, 0], off[:, 1])
        ux, uy = w.unit
        with np.errstate(invalid="ignore", divide="ignore"):
            cos_phi = np.where(norm > 0, (off[:, 0] * ux + off[:, 1] * uy) / norm, 0.0)
    else:
        cos_phi = np.zeros(len(cells))
    factor = min(f.intensity, MAX_INTENSITY_FACTOR)
    prob = p.p_base * factor * (1.0 + p.wind_bias * cos_phi)
    return np.clip(prob, 0.0, 1.0)


def spread_mask(f: FireSource, grid: GridMap, w: Weather, p: FireParams, rng: np.random.Generator) -> set[Cell]:
    """Cells ignited by ``f`` this tick.

    Every candidate consumes exactly one uniform draw, in row-major order,
    so the generator stream does not depend on the probabilities.
    """
    cells = spread_candidates(f, grid)
    if not cells:
        return set()
    prob = spread_probabilities(f, cells, w, p)
    draws = rng.random(len(cells))
    return {c for c, u, q in zip(cells, draws, prob) if u < q}


def _enclosing(a: FireSource, b: FireSource) -> FireSource:
    intensity = a.intensity + b.intensity
    if a.contains_disc(b, eps=0.0):
        return replace(a, intensity=intensity)
    if b.contains_disc(a, eps=0.0):
        return replace(b, intensity=intensity)
    d = math.dist(a.center, b.center)
    radius = (d + a.radius + b.radius) / 2.0
    t = (radius - a.radius) / d
    cx = a.center[0] + t * (b.center[0] - a.center[0])
    cy = a.center[1] + t * (b.center[1] - a.center[1])
    return FireSource((cx, cy), radius, intensity)


def _touching(a: FireSource, b: FireSource) -> bool:
    return math.dist(a.center, b.center) <= a.radius + b.radius


def _order(sources: Iterable[FireSource]) -> list[FireSource]:
    return sorted(sources, key=lambda s: (s.center[0], s.center[1], s.radius, s.intensity))


def merge_fires(sources: Iterable[FireSource]) -> list[FireSource]:
    """Replace touching discs by their smallest enclosing disc until none touch.

    Intensities add. The result is sorted by centre x, then y.
    """
    fires = _order(sources)
    merged = True
    while merged:
        merged = False
        for i in range(len(fires)):
            for j in range(i + 1, len(fires)):
                if _touching(fires[i], fires[j]):
                    union = _enclosing(fires[i], fires[j])
                    rest = [s for k, s in enumerate(fires) if k not in (i, j)]
                    fires = _order(rest + [union])
                    merged = True
                    break
            if merged:
                break
    return fires


def fire_disc_mask(sources: Iterable[FireSource], shape: tuple[int, int]) -> np.ndarray:
    h, w = shape
    mask = np.zeros(shape, dtype=bool)
    ys, xs = np.ogrid[:h, :w]
    for s in sources:
        cx, cy = s.center
        mask |= (xs - cx) ** 2 + (ys - cy) ** 2 <= s.radius * s.radius
    return mask


def rasterize_fire(sources: Iterable[FireSource], grid: GridMap) -> GridMap:
    """Mark every cell within some source's radius as Fire.

    Smoke underneath is overwritten; nothing is ever un-burnt.
    """
    mask = fire_disc_mask(sources, grid.shape)
    if not mask.any():
        return grid
    hazard = grid.hazard.copy()
    hazard[mask] = Hazard.FIRE
    return grid.with_hazard(hazard)


def ignite(grid: GridMap, cells: Iterable[Cell]) -> GridMap:
    cells = list(cells)
    if not cells:
        return grid
    hazard = grid.hazard.copy()
    xs, ys = zip(*cells)
    hazard[list(ys), list(xs)] = Hazard.FIRE
    return grid.with_hazard(hazard)
