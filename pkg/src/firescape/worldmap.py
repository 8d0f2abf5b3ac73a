"""Raster road network: pixel legend, hazard overlay and PNG I/O.

Coordinates are ``(x, y) = (column, row)`` with the origin at the top-left
pixel, the same convention image viewers use.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Sequence, Union

import numpy as np
from PIL import Image, UnidentifiedImageError


class CellClass(enum.IntEnum):
    BACKGROUND = 0
    GOOD_ROAD = 1
    BAD_ROAD = 2


class Hazard(enum.IntEnum):
    NONE = 0
    FIRE = 1
    SMOKE = 2


class Traversal(enum.IntEnum):
    """What the planner sees once the hazard overlay is composited."""

    FORBIDDEN = 0
    GOOD_ROAD = 1
    BAD_ROAD = 2


class MoveKind(enum.IntEnum):
    CARDINAL = 0
    DIAGONAL = 1


class Cell(NamedTuple):
    x: int
    y: int


class MapFormatError(ValueError):
    """The raster could not be decoded."""


class ClassificationError(ValueError):
    """A pixel does not match any legend colour."""

    def __init__(self, color, cell: Optional[Cell] = None):
        self.color = tuple(int(c) for c in color)
        self.cell = cell
        where = f" at {tuple(cell)}" if cell is not None else ""
        super().__init__(f"unclassifiable pixel {self.color}{where}")


class RenderError(ValueError):
    pass


# Legend -------------------------------------------------------------------

TOLERANCE = 30
SMOKE_BAND = (50, 220)

BASE_COLORS = {
    CellClass.BACKGROUND: (0, 0, 0),
    CellClass.GOOD_ROAD: (0, 255, 0),
    CellClass.BAD_ROAD: (255, 255, 255),
}
FIRE_COLOR = (255, 0, 0)
SMOKE_COLOR = (128, 128, 128)
ROUTE_COLOR = (200, 0, 0)
START_COLOR = (0, 0, 255)
GOAL_COLOR = (255, 255, 0)
MARKER_RADIUS = 2

_NEIGHBOR_OFFSETS = tuple(
    (dx, dy, MoveKind.DIAGONAL if dx and dy else MoveKind.CARDINAL)
    for dy in (-1, 0, 1)
    for dx in (-1, 0, 1)
    if dx or dy
)


def _smoke_distance(rgb: np.ndarray) -> np.ndarray:
    # Chebyshev distance to the nearest gray (v, v, v) with v in SMOKE_BAND.
    lo = rgb.min(axis=-1)
    hi = rgb.max(axis=-1)
    v = np.clip((lo + hi) / 2.0, *SMOKE_BAND)
    return np.maximum(hi - v, v - lo)


def _legend_distances(rgb: np.ndarray) -> np.ndarray:
    """Per-pixel distance to each legend entry, shape (..., 5).

    Entry order is Background, GoodRoad, BadRoad, Fire, Smoke; ties resolve to
    the earlier entry.
    """
    rgb = rgb.astype(np.int32)
    refs = [*BASE_COLORS.values(), FIRE_COLOR]
    dists = [np.abs(rgb - np.array(ref)).max(axis=-1) for ref in refs]
    dists.append(_smoke_distance(rgb))
    return np.stack(dists, axis=-1).astype(np.float64)


_LEGEND = (
    CellClass.BACKGROUND,
    CellClass.GOOD_ROAD,
    CellClass.BAD_ROAD,
    Hazard.FIRE,
    Hazard.SMOKE,
)


def classify_pixel(color: Sequence[int]) -> Union[CellClass, Hazard]:
    """Map an RGB triple to the nearest legend class within ``TOLERANCE``.

    >>> classify_pixel((0, 250, 10))
    <CellClass.GOOD_ROAD: 1>
    >>> classify_pixel((128, 128, 128))
    <Hazard.SMOKE: 2>
    """
    rgb = np.asarray(color[:3], dtype=np.int32)
    d = _legend_distances(rgb)
    best = int(np.argmin(d))
    if d[best] > TOLERANCE:
        raise ClassificationError(rgb)
    return _LEGEND[best]


@dataclass(frozen=True, eq=False)
class GridMap:
    """Base road classes plus a hazard overlay, both ``(height, width)`` uint8.

    Instances are snapshots: the arrays are read-only and hazard updates go
    through :meth:`with_hazard`.
    """

    base: np.ndarray
    hazard: np.ndarray

    def __post_init__(self):
        base = np.array(self.base, dtype=np.uint8)
        hazard = np.array(self.hazard, dtype=np.uint8)
        if base.ndim != 2 or base.shape[0] < 1 or base.shape[1] < 1:
            raise ValueError(f"base layer must be a non-empty 2-D array, got {base.shape}")
        if hazard.shape != base.shape:
            raise ValueError(f"hazard shape {hazard.shape} != base shape {base.shape}")
        base.flags.writeable = False
        hazard.flags.writeable = False
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "hazard", hazard)

    @classmethod
    def from_base(cls, base) -> "GridMap":
        base = np.asarray(base, dtype=np.uint8)
        return cls(base, np.zeros_like(base))

    @property
    def width(self) -> int:
        return self.base.shape[1]

    @property
    def height(self) -> int:
        return self.base.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.base.shape

    def in_bounds(self, c) -> bool:
        return 0 <= c[0] < self.width and 0 <= c[1] < self.height

    def with_hazard(self, hazard) -> "GridMap":
        return GridMap(self.base, hazard)

    def base_at(self, c) -> CellClass:
        return CellClass(int(self.base[c[1], c[0]]))

    def hazard_at(self, c) -> Hazard:
        return Hazard(int(self.hazard[c[1], c[0]]))

    def traversal_grid(self) -> np.ndarray:
        """Vectorised :func:`effective_class` for every cell."""
        grid = self.base.copy()
        grid[self.base == CellClass.BACKGROUND] = Traversal.FORBIDDEN
        grid[self.hazard != Hazard.NONE] = Traversal.FORBIDDEN
        return grid

    def count(self, value: Hazard) -> int:
        return int(np.count_nonzero(self.hazard == value))


def load_map(image: Union[str, Path, Image.Image, np.ndarray]) -> GridMap:
    """Build a :class:`GridMap` from a legend-coloured RGB raster.

    Accepts a path, a PIL image or an ``(h, w, 3|4)`` array; alpha is ignored.
    Fire and smoke pixels go to the hazard overlay over a Background base,
    since the road class under a hazard is unknown.
    """
    rgb = _as_rgb(image)
    d = _legend_distances(rgb)
    best = d.argmin(axis=-1)
    bad = np.take_along_axis(d, best[..., None], axis=-1)[..., 0] > TOLERANCE
    if bad.any():
        y, x = (int(v) for v in np.argwhere(bad)[0])
        raise ClassificationError(rgb[y, x], Cell(x, y))
    base = np.where(best <= 2, best, CellClass.BACKGROUND).astype(np.uint8)
    hazard = np.zeros_like(base)
    hazard[best == 3] = Hazard.FIRE
    hazard[best == 4] = Hazard.SMOKE
    return GridMap(base, hazard)


def _as_rgb(image) -> np.ndarray:
    if isinstance(image, (str, Path)):
        try:
            with Image.open(image) as im:
                im.load()
                image = im.convert("RGB")
        except (UnidentifiedImageError, OSError) as exc:
            if isinstance(exc, FileNotFoundError):
                raise
            raise MapFormatError(f"cannot decode {image}: {exc}") from exc
    if isinstance(image, Image.Image):
        image = np.asarray(image.convert("RGB"))
    arr = np.asarray(image)
    if arr.ndim != 3 or arr.shape[-1] not in (3, 4) or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise MapFormatError(f"expected an (h, w, 3) RGB raster, got shape {arr.shape}")
    return arr[..., :3].astype(np.int32)


def legend_histogram(rgb: np.ndarray) -> tuple[dict[str, int], list[tuple[Cell, tuple]]]:
    """Count pixels per legend class and list unclassifiable ones (row-major)."""
    rgb = _as_rgb(rgb)
    d = _legend_distances(rgb)
    best = d.argmin(axis=-1)
    bad = np.take_along_axis(d, best[..., None], axis=-1)[..., 0] > TOLERANCE
    counts = {
        cls.name: int(np.count_nonzero((best == i) & ~bad)) for i, cls in enumerate(_LEGEND)
    }
    offenders = [
        (Cell(int(x), int(y)), tuple(int(v) for v in rgb[y, x])) for y, x in np.argwhere(bad)
    ]
    return counts, offenders


def neighbors8(grid: GridMap, c) -> list[tuple[Cell, MoveKind]]:
    """In-bounds 8-neighbourhood of ``c``, row-major by ``(dy, dx)``."""
    x, y = c
    w, h = grid.width, grid.height
    return [
        (Cell(x + dx, y + dy), kind)
        for dx, dy, kind in _NEIGHBOR_OFFSETS
        if 0 <= x + dx < w and 0 <= y + dy < h
    ]


def effective_class(grid: GridMap, c) -> Traversal:
    if grid.hazard[c[1], c[0]] != Hazard.NONE:
        return Traversal.FORBIDDEN
    base = grid.base[c[1], c[0]]
    if base == CellClass.BACKGROUND:
        return Traversal.FORBIDDEN
    return Traversal(int(base))


def render(
    grid: GridMap,
    route: Optional[Iterable] = None,
    start=None,
    goal=None,
    smoke_gray: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Draw the map in legend colours, returning an ``(h, w, 3)`` uint8 array.

    Smoke cells use ``smoke_gray`` where it is non-zero, else ``SMOKE_COLOR``.
    The route is drawn in ``ROUTE_COLOR``; start and goal get blue and yellow
    discs of radius ``MARKER_RADIUS`` clipped to the map.
    """
    out = np.zeros((grid.height, grid.width, 3), dtype=np.uint8)
    for cls, color in BASE_COLORS.items():
        out[grid.base == cls] = color
    out[grid.hazard == Hazard.FIRE] = FIRE_COLOR
    smoke = grid.hazard == Hazard.SMOKE
    out[smoke] = SMOKE_COLOR
    if smoke_gray is not None:
        shaded = smoke & (smoke_gray > 0)
        out[shaded] = np.repeat(smoke_gray[shaded].astype(np.uint8)[:, None], 3, axis=1)

    if route is not None:
        for c in route:
            if not grid.in_bounds(c):
                raise RenderError(f"route cell {tuple(c)} outside {grid.width}x{grid.height} map")
            out[c[1], c[0]] = ROUTE_COLOR
    for marker, color in ((start, START_COLOR), (goal, GOAL_COLOR)):
        if marker is None:
            continue
        if not grid.in_bounds(marker):
            raise RenderError(f"marker {tuple(marker)} outside map")
        _disc(out, marker, MARKER_RADIUS, color)
    return out


def _disc(out: np.ndarray, center, radius: int, color) -> None:
    h, w = out.shape[:2]
    cx, cy = center
    ys, xs = np.ogrid[:h, :w]
    out[(xs - cx) ** 2 + (ys - cy) ** 2 <= radius * radius] = color


def save_png(rgb: np.ndarray, path: Union[str, Path]) -> None:
    Image.fromarray(np.ascontiguousarray(rgb, dtype=np.uint8)).save(path, format="PNG")
