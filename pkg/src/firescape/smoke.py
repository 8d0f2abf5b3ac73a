"""Particle smoke: emission around fire sources, wind drift, ageing, rasterisation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .fire import FireSource, Weather
from .worldmap import GridMap, Hazard

GRAY_RANGE = (80, 200)


@dataclass(frozen=True)
class SmokeParticle:
    position: tuple[float, float]
    gray: int
    age: float = 0

    def cell(self) -> tuple[int, int]:
        return math.floor(self.position[0]), math.floor(self.position[1])


@dataclass(frozen=True)
class SmokeParams:
    emission_rate: float = 10.0
    band: float = 3.0
    angular_spread: float = 60.0
    drift_gain: float = 1.0
    lifetime: float = 25

    def __post_init__(self):
        for name in ("emission_rate", "band", "angular_spread", "drift_gain", "lifetime"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.lifetime < 1:
            raise ValueError("lifetime must be >= 1")


def emission_count(intensity: float, p: SmokeParams) -> int:
    # Guard against products like 10 * 0.3 = 3.0000000000000004 rounding up.
    return max(0, math.ceil(round(p.emission_rate * intensity, 9)))


def emit_smoke(f: FireSource, p: SmokeParams, w: Weather, rng: np.random.Generator) -> list[SmokeParticle]:
    """Spawn ``ceil(emission_rate * intensity)`` particles just outside the fire rim.

    Particles land at a distance in ``[radius, radius + band]`` from the
    centre, within ``angular_spread`` degrees of downwind (any direction in
    calm air).
    """
    n = emission_count(f.intensity, p)
    if n == 0:
        return []
    rho = rng.uniform(f.radius, f.radius + p.band, size=n)
    if w.wind_speed > 0:
        psi = w.wind_direction + rng.uniform(-p.angular_spread, p.angular_spread, size=n)
    else:
        psi = rng.uniform(0.0, 360.0, size=n)
    gray = rng.integers(GRAY_RANGE[0], GRAY_RANGE[1] + 1, size=n)
    rad = np.radians(psi)
    xs = f.center[0] + rho * np.cos(rad)
    ys = f.center[1] + rho * np.sin(rad)
    return [
        SmokeParticle((float(x), float(y)), int(g), 0)
        for x, y, g in zip(xs, ys, gray)
    ]


def advect_smoke(
    particles: Iterable[SmokeParticle], w: Weather, p: SmokeParams, dt: float = 1.0
) -> list[SmokeParticle]:
    if dt < 0:
        raise ValueError("dt must be >= 0")
    ux, uy = w.unit
    step = p.drift_gain * w.wind_speed * dt
    out = []
    for s in particles:
        age = s.age + dt
        if age > p.lifetime:
            continue
        out.append(SmokeParticle((s.position[0] + step * ux, s.position[1] + step * uy), s.gray, age))
    return out


def _cells(particles: Sequence[SmokeParticle], shape) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    h, w = shape
    if not particles:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    pos = np.array([s.position for s in particles], dtype=np.float64)
    xs = np.floor(pos[:, 0]).astype(np.int64)
    ys = np.floor(pos[:, 1]).astype(np.int64)
    gray = np.array([s.gray for s in particles], dtype=np.int64)
    inside = (xs >= 0) & (xs < w) & (ys >= 0) & (ys < h)
    return xs[inside], ys[inside], gray[inside]


def rasterize_smoke(particles: Sequence[SmokeParticle], grid: GridMap) -> GridMap:
    """Rebuild the Smoke layer from the live particles.

    Fire cells are left alone; every other cell is Smoke if it holds a
    particle and None otherwise.
    """
    xs, ys, _ = _cells(list(particles), grid.shape)
    hazard = grid.hazard.copy()
    hazard[hazard == Hazard.SMOKE] = Hazard.NONE
    occupied = np.zeros(grid.shape, dtype=bool)
    occupied[ys, xs] = True
    hazard[occupied & (hazard != Hazard.FIRE)] = Hazard.SMOKE
    return grid.with_hazard(hazard)


def smoke_gray(particles: Sequence[SmokeParticle], shape) -> np.ndarray:
    """Per-cell maximum particle gray, zero where no particle sits."""
    xs, ys, gray = _cells(list(particles), shape)
    out = np.zeros(shape, dtype=np.uint8)
    np.maximum.at(out, (ys, xs), gray.astype(np.uint8))
    return out
