"""Pairwise repulsion/attraction and per-node force combination.

Forces are 2-vectors in map units: each is the displacement a circle would
need to make on its own to resolve its share of a conflict.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .circles import Circle
from .errors import ConfigError
from .graph import EdgeType, ProximityGraph

ForceVec = np.ndarray  # shape (2,)


@dataclass(frozen=True)
class ForceConfig:
    """Long-edge threshold in graphic mm; ``math.inf`` lets every Type-1 edge attract."""

    t_l_mm: float = math.inf
    attract_enabled: bool = True

    def __post_init__(self):
        if math.isnan(self.t_l_mm) or self.t_l_mm < 0:
            raise ConfigError(f"t_l_mm must be >= 0 or inf, got {self.t_l_mm!r}")


def _unit_from(b: Circle, a: Circle) -> np.ndarray:
    """Unit vector pointing from b's centre to a's centre."""
    d = np.array(a.center, dtype=float) - np.array(b.center, dtype=float)
    norm = math.hypot(d[0], d[1])
    if norm == 0.0:
        warnings.warn(
            f"circles {a.region_id!r} and {b.region_id!r} share a centre; separating along +x",
            stacklevel=3,
        )
        return np.array([1.0, 0.0])
    return d / norm


def repulsive_pair(a: Circle, b: Circle, gap: float) -> tuple[ForceVec, ForceVec]:
    if not gap < 0:
        raise ValueError(f"repulsion needs an overlap (gap < 0), got {gap!r}")
    u = _unit_from(b, a)
    depth = -gap
    total = a.radius + b.radius
    return u * (depth * b.radius / total), -u * (depth * a.radius / total)


def attractive_pair(a: Circle, b: Circle, gap: float) -> tuple[ForceVec, ForceVec]:
    if gap < 0:
        raise ValueError(f"attraction needs separated circles (gap >= 0), got {gap!r}")
    if gap == 0:
        return np.zeros(2), np.zeros(2)
    u = _unit_from(a, b)  # a -> b
    total = a.radius + b.radius
    return u * (gap * b.radius / total), -u * (gap * a.radius / total)


def node_forces(
    graph: ProximityGraph, cfg: ForceConfig, units_per_mm: float = 1.0, clearance: float = 0.0
) -> list[list[ForceVec]]:
    """Per-node lists of pair forces, in edge order.

    Overlapping edges repel. Separated Type-1 edges attract unless their gap
    exceeds the long-edge threshold; Type-2 separated edges are inert.
    ``clearance`` (map units) makes repulsion aim for a gap of that size
    instead of exact tangency.
    """
    t_l = cfg.t_l_mm * units_per_mm
    out: list[list[ForceVec]] = [[] for _ in graph.nodes]
    for e in sorted(graph.edges, key=lambda e: (e.a, e.b)):
        a, b = graph.nodes[e.a], graph.nodes[e.b]
        if e.length < 0:
            fa, fb = repulsive_pair(a, b, e.length - clearance)
        elif (
            e.edge_type == EdgeType.TYPE1
            and cfg.attract_enabled
            and e.length > 0
            and e.length <= t_l
        ):
            fa, fb = attractive_pair(a, b, e.length)
        else:
            continue
        out[e.a].append(fa)
        out[e.b].append(fb)
    return out


def combine(forces) -> ForceVec:
    """Resultant from the extreme components along four local directions.

    The local x-axis follows the largest force (ties: smallest polar angle).
    Along each local axis the largest positive and the largest negative
    component are kept and summed, so parallel forces do not accumulate.
    """
    if len(forces) == 0:
        return np.zeros(2)
    F = np.asarray(forces, dtype=float).reshape(-1, 2)
    if len(F) == 1:
        return F[0].copy()
    mags = np.hypot(F[:, 0], F[:, 1])
    if mags.max() == 0.0:
        return np.zeros(2)
    angles = np.mod(np.arctan2(F[:, 1], F[:, 0]), 2 * math.pi)
    main = np.lexsort((angles, -mags))[0]
    ux = F[main] / mags[main]
    uy = np.array([-ux[1], ux[0]])
    px, py = F @ ux, F @ uy
    lx = max(px.max(), 0.0) + min(px.min(), 0.0)
    ly = max(py.max(), 0.0) + min(py.min(), 0.0)
    return lx * ux + ly * uy


def combined_forces(
    graph: ProximityGraph, cfg: ForceConfig, units_per_mm: float = 1.0, clearance: float = 0.0
) -> np.ndarray:
    """(n, 2) array of combined forces, one row per node."""
    per_node = node_forces(graph, cfg, units_per_mm, clearance)
    return np.array([combine(f) for f in per_node], dtype=float).reshape(-1, 2)
