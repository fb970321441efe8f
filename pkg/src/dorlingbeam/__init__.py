"""Circular cartograms (Dorling maps) by elastic-beam displacement."""

from .circles import Circle, RadiusSearchConfig, generate_initial_circles
from .engine import EngineConfig, IterationTrace, default_steps, run
from .errors import CartogramError, ConfigError, DatasetError, SolverError
from .forces import ForceConfig
from .geo import MapScale, Region, adjacency_pairs, derive_scale, load_regions
from .graph import build_graph, build_mst_graph
from .metrics import MetricsReport, evaluate
from .sosp import run_sosp

__all__ = [
    "Circle", "RadiusSearchConfig", "generate_initial_circles",
    "EngineConfig", "IterationTrace", "default_steps", "run",
    "CartogramError", "ConfigError", "DatasetError", "SolverError",
    "ForceConfig", "MapScale", "Region", "adjacency_pairs", "derive_scale", "load_regions",
    "build_graph", "build_mst_graph", "MetricsReport", "evaluate", "run_sosp",
]
