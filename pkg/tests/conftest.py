from pathlib import Path

import numpy as np
import pytest

from firescape.worldmap import CellClass, GridMap, Hazard

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"

_BASE = {".": CellClass.BACKGROUND, "G": CellClass.GOOD_ROAD, "B": CellClass.BAD_ROAD,
         "F": CellClass.GOOD_ROAD, "S": CellClass.GOOD_ROAD}
_HAZ = {"F": Hazard.FIRE, "S": Hazard.SMOKE}


def grid_from_rows(*rows: str) -> GridMap:
    """'.' background, 'G' good road, 'B' bad road, 'F'/'S' good road under fire/smoke."""
    base = np.array([[_BASE[ch] for ch in row] for row in rows], dtype=np.uint8)
    hazard = np.array([[_HAZ.get(ch, Hazard.NONE) for ch in row] for row in rows], dtype=np.uint8)
    return GridMap(base, hazard)


def random_grid(rng: np.random.Generator, w: int, h: int, p_bad: float = 0.0,
                p_block: float = 0.2, p_hazard: float = 0.0) -> GridMap:
    u = rng.random((h, w))
    base = np.where(u < p_block, CellClass.BACKGROUND,
                    np.where(u < p_block + p_bad, CellClass.BAD_ROAD, CellClass.GOOD_ROAD))
    v = rng.random((h, w))
    hazard = np.where(v < p_hazard / 2, Hazard.FIRE,
                      np.where(v < p_hazard, Hazard.SMOKE, Hazard.NONE))
    return GridMap(base.astype(np.uint8), hazard.astype(np.uint8))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE: list[tuple[int, str, bool, float]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _ACCEPTANCE.append((*marker.args, rep.passed, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, duration in sorted(_ACCEPTANCE):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] AC{number} {title} ({duration:.2f}s)")
