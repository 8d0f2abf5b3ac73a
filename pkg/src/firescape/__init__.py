"""Wildfire escape-route planning on classified road rasters."""

from .fire import FireParams, FireSource, Weather, advect_fire, grow_fire, merge_fires, rasterize_fire, spread_mask
from .oracle import dijkstra_reference
from .planner import CostParams, HazardAtEndpoint, NoRouteFound, PlanResult, heuristic, plan, step_cost
from .sim import Scenario, ScenarioError, SimReport, load_scenario, run
from .smoke import SmokeParams, SmokeParticle, advect_smoke, emit_smoke, rasterize_smoke
from .worldmap import (
    Cell,
    CellClass,
    ClassificationError,
    GridMap,
    Hazard,
    MapFormatError,
    MoveKind,
    Traversal,
    classify_pixel,
    effective_class,
    load_map,
    neighbors8,
    render,
)

__version__ = "0.1.0"
