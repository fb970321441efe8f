"""Cartogram quality measures and report formatting."""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .circles import Circle, gap_matrix
from .geo import MapScale
from .graph import ProximityGraph


@dataclass
class MetricsReport:
    num_overlaps: int
    rt_maintained: int
    rt_total: int
    rms_degrees: float
    tdd: float
    circle_count: int
    edge_count: int
    iterations_attract: int
    iterations_total: int
    wall_time_seconds: float
    algorithm: str = "beam"
    tdd_unit: str = "map units"

    def __post_init__(self):
        if not 0 <= self.rt_maintained <= self.rt_total:
            raise ValueError("need 0 <= rt_maintained <= rt_total")
        if self.num_overlaps < 0 or self.rms_degrees < 0 or self.tdd < 0:
            raise ValueError("metrics must be non-negative")

    @property
    def rt_ratio(self) -> float | None:
        """maintained / total, or None when the dataset has no adjacencies."""
        return self.rt_maintained / self.rt_total if self.rt_total else None

    def as_dict(self) -> dict:
        d = asdict(self)
        d["rt_ratio"] = self.rt_ratio
        return d

    def to_text(self) -> str:
        lines = []
        for k, v in self.as_dict().items():
            if v is None:
                v = "undefined"
            elif isinstance(v, float):
                v = f"{v:.6g}"
            lines.append(f"{k}: {v}")
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        """JSON for ``.json`` paths, ``key: value`` lines otherwise."""
        path = Path(path)
        if path.suffix.lower() == ".json":
            path.write_text(json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n")
        else:
            path.write_text(self.to_text())


def _arrays(circles):
    centers = np.array([c.center for c in circles], dtype=float).reshape(-1, 2)
    radii = np.array([c.radius for c in circles], dtype=float)
    return centers, radii


def num_overlaps(circles: Sequence[Circle], tol_overlap: float | None = None) -> int:
    """Unordered pairs with gap < -tol (default tol: 1e-9 x mean radius)."""
    if len(circles) < 2:
        return 0
    centers, radii = _arrays(circles)
    if tol_overlap is None:
        tol_overlap = 1e-9 * float(radii.mean())
    g = gap_matrix(centers, radii)
    return int(np.count_nonzero(np.triu(g < -tol_overlap, 1)))


def rt(
    circles: Sequence[Circle],
    adjacency: Iterable[frozenset],
    tol_adj_mm: float = 0.1,
    scale: MapScale | None = None,
) -> tuple[int, int]:
    """(maintained, total): adjacent pairs whose final gap is within tolerance."""
    tol = tol_adj_mm * (scale.units_per_mm if scale else 1.0)
    by_id = {c.region_id: c for c in circles}
    total = maintained = 0
    for pair in adjacency:
        a, b = tuple(pair)
        total += 1
        ca, cb = by_id[a], by_id[b]
        gap = math.hypot(ca.center[0] - cb.center[0], ca.center[1] - cb.center[1]) - ca.radius - cb.radius
        if gap <= tol:
            maintained += 1
    return maintained, total


def _wrap_deg(delta: float) -> float:
    """Wrap to (-180, 180]."""
    w = math.fmod(delta, 360.0)
    if w <= -180.0:
        w += 360.0
    elif w > 180.0:
        w -= 360.0
    return w


def rms_direction(
    circles_before: Sequence[Circle], circles_after: Sequence[Circle], graph_before: ProximityGraph
) -> float:
    """RMS change (degrees) of centre-to-centre link directions over graph edges."""
    after = {c.region_id: c for c in circles_after}
    sq = []
    for e in graph_before.edges:
        a0, b0 = circles_before[e.a], circles_before[e.b]
        a1, b1 = after[a0.region_id], after[b0.region_id]
        v0 = (b0.center[0] - a0.center[0], b0.center[1] - a0.center[1])
        v1 = (b1.center[0] - a1.center[0], b1.center[1] - a1.center[1])
        if v0 == (0.0, 0.0) or v1 == (0.0, 0.0):
            warnings.warn(f"edge {a0.region_id}-{b0.region_id} has coincident centres; skipped", stacklevel=2)
            continue
        d = math.degrees(math.atan2(v1[1], v1[0]) - math.atan2(v0[1], v0[0]))
        sq.append(_wrap_deg(d) ** 2)
    return math.sqrt(sum(sq) / len(sq)) if sq else 0.0


def tdd(circles_before: Sequence[Circle], circles_after: Sequence[Circle]) -> float:
    """Sum of distances from each original centre to its final centre."""
    after = {c.region_id: c for c in circles_after}
    total = 0.0
    for c in circles_before:
        p = after[c.region_id].center
        total += math.hypot(p[0] - c.original_center[0], p[1] - c.original_center[1])
    return total


COMPARISON_ROWS = [
    ("NumO", lambda r: str(r.num_overlaps)),
    ("RT", lambda r: f"{r.rt_maintained}/{r.rt_total} = {100 * r.rt_ratio:.2f}%" if r.rt_total else "undefined"),
    ("RMS", lambda r: f"{r.rms_degrees:.2f}"),
    ("TDD", lambda r: f"{r.tdd:.6g}"),
    ("CN", lambda r: str(r.circle_count)),
    ("EN", lambda r: str(r.edge_count)),
    ("IS", lambda r: f"{r.iterations_attract}+{r.iterations_total - r.iterations_attract}"),
    ("t(s)", lambda r: f"{r.wall_time_seconds:.2f}"),
]


def comparison_table(reports: dict[str, MetricsReport]) -> str:
    """Tab-separated table, one column per named run."""
    names = list(reports)
    lines = ["\t" + "\t".join(names)]
    for label, fmt in COMPARISON_ROWS:
        lines.append(label + "\t" + "\t".join(fmt(reports[n]) for n in names))
    return "\n".join(lines) + "\n"


def evaluate(
    circles_before: Sequence[Circle],
    circles_after: Sequence[Circle],
    graph_before: ProximityGraph,
    adjacency: Iterable[frozenset],
    scale: MapScale,
    iterations_attract: int,
    iterations_total: int,
    wall_time_seconds: float,
    algorithm: str = "beam",
    tol_adj_mm: float = 0.1,
) -> MetricsReport:
    """All four measures plus the size and effort counters for one run."""
    maintained, total = rt(circles_after, adjacency, tol_adj_mm, scale)
    return MetricsReport(
        num_overlaps=num_overlaps(circles_after),
        rt_maintained=maintained,
        rt_total=total,
        rms_degrees=rms_direction(circles_before, circles_after, graph_before),
        tdd=tdd(circles_before, circles_after),
        circle_count=len(circles_after),
        edge_count=len(graph_before.edges),
        iterations_attract=iterations_attract,
        iterations_total=iterations_total,
        wall_time_seconds=wall_time_seconds,
        algorithm=algorithm,
    )
