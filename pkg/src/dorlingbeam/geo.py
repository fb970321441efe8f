"""Region ingest: feature-collection parsing, centroids, adjacency, map scale.

Coordinates are treated as planar map units throughout; no reprojection.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import shapely
from shapely.geometry import MultiPolygon, Polygon

from .errors import ConfigError, DatasetError

Ring = np.ndarray  # (k, 2) float array, closed (first == last)
PolygonRings = tuple  # (exterior, *holes)


@dataclass(frozen=True, eq=False)
class Region:
    """One mapped unit: an id, its (multi)polygon, and its statistical value."""

    id: str
    geometry: tuple[PolygonRings, ...]
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value) or self.value < 0:
            raise DatasetError(f"region {self.id!r}: value must be finite and >= 0, got {self.value!r}")
        for poly in self.geometry:
            for ring in poly:
                if len(ring) < 4 or not np.array_equal(ring[0], ring[-1]):
                    raise DatasetError(f"region {self.id!r}: ring must be closed with >= 4 points")

    def to_shapely(self):
        polys = [Polygon(p[0], p[1:]) for p in self.geometry]
        return polys[0] if len(polys) == 1 else MultiPolygon(polys)

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        pts = np.concatenate([p[0] for p in self.geometry])
        return (*pts.min(axis=0), *pts.max(axis=0))


@dataclass(frozen=True)
class MapScale:
    """Map units per graphic millimetre."""

    units_per_mm: float

    def __post_init__(self):
        if not self.units_per_mm > 0:
            raise ConfigError(f"units_per_mm must be > 0, got {self.units_per_mm!r}")

    def to_map(self, mm: float) -> float:
        return mm * self.units_per_mm

    def to_mm(self, length: float) -> float:
        return length / self.units_per_mm


def _ring(coords, fid) -> Ring:
    arr = np.asarray(coords, dtype=float)
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise DatasetError(f"feature {fid!r}: malformed ring")
    arr = np.ascontiguousarray(arr[:, :2])
    if len(arr) and not np.array_equal(arr[0], arr[-1]):
        arr = np.vstack([arr, arr[:1]])
    return arr


def _parse_geometry(geom, fid) -> tuple[PolygonRings, ...]:
    if not geom:
        raise DatasetError(f"feature {fid!r}: missing geometry")
    kind = geom.get("type")
    if kind == "Polygon":
        parts = [geom["coordinates"]]
    elif kind == "MultiPolygon":
        parts = geom["coordinates"]
    else:
        raise DatasetError(f"feature {fid!r}: geometry type {kind!r} is not polygonal")
    return tuple(tuple(_ring(r, fid) for r in part) for part in parts)


def _feature_id(feature, index: int, id_field: str | None) -> str:
    props = feature.get("properties") or {}
    if id_field is not None:
        if id_field not in props:
            raise DatasetError(f"feature #{index}: id field {id_field!r} missing")
        return str(props[id_field])
    if feature.get("id") is not None:
        return str(feature["id"])
    return str(index)


def parse_regions(doc: dict, value_field: str, id_field: str | None = None) -> list[Region]:
    """Build regions from an already-decoded feature collection."""
    if doc.get("type") != "FeatureCollection":
        raise DatasetError("input is not a FeatureCollection")
    regions = []
    seen = set()
    for i, feat in enumerate(doc.get("features") or []):
        fid = _feature_id(feat, i, id_field)
        if fid in seen:
            raise DatasetError(f"duplicate feature id {fid!r}")
        seen.add(fid)
        props = feat.get("properties") or {}
        raw = props.get(value_field)
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise DatasetError(f"feature {fid!r}: value field {value_field!r} missing or non-numeric ({raw!r})")
        regions.append(Region(fid, _parse_geometry(feat.get("geometry"), fid), float(raw)))
    return regions


def load_regions(path, value_field: str, id_field: str | None = None) -> list[Region]:
    """Read a GeoJSON-style feature collection of (multi)polygons.

    Region ids come from ``id_field`` if given, else the feature ``id``, else
    the feature's position in the file.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        raise DatasetError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path}: not valid JSON ({exc})") from None
    return parse_regions(doc, value_field, id_field)


def regions_to_features(regions: Iterable[Region], value_field: str) -> dict:
    feats = []
    for r in regions:
        polys = [[ring.tolist() for ring in poly] for poly in r.geometry]
        geom = (
            {"type": "Polygon", "coordinates": polys[0]}
            if len(polys) == 1
            else {"type": "MultiPolygon", "coordinates": polys}
        )
        feats.append({"type": "Feature", "id": r.id, "properties": {value_field: r.value}, "geometry": geom})
    return {"type": "FeatureCollection", "features": feats}


def write_regions(path, regions: Iterable[Region], value_field: str) -> None:
    Path(path).write_text(json.dumps(regions_to_features(regions, value_field)))


def _ring_area_centroid(ring: Ring) -> tuple[float, float, float]:
    x, y = ring[:-1, 0], ring[:-1, 1]
    # Shift to the first vertex to limit cancellation on projected coordinates.
    x0, y0 = x[0], y[0]
    x, y = x - x0, y - y0
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    a = cross.sum() / 2.0
    if a == 0.0:
        return 0.0, x0, y0
    cx = ((x + xn) * cross).sum() / (6.0 * a)
    cy = ((y + yn) * cross).sum() / (6.0 * a)
    return abs(a), cx + x0, cy + y0


def centroid(region: Region) -> tuple[float, float]:
    """Area-weighted centroid over all parts; holes carry negative weight."""
    total = 0.0
    sx = sy = 0.0
    for poly in region.geometry:
        for k, ring in enumerate(poly):
            a, cx, cy = _ring_area_centroid(ring)
            if k:
                a = -a
            total += a
            sx += a * cx
            sy += a * cy
    if total <= 0.0:
        warnings.warn(f"region {region.id!r} has zero area; using vertex mean as centroid", stacklevel=2)
        pts = np.concatenate([ring[:-1] for poly in region.geometry for ring in poly])
        m = pts.mean(axis=0)
        return float(m[0]), float(m[1])
    return sx / total, sy / total


def _bbox(regions: Sequence[Region]) -> tuple[float, float, float, float]:
    b = np.array([r.bounds for r in regions])
    return b[:, 0].min(), b[:, 1].min(), b[:, 2].max(), b[:, 3].max()


def default_snap_tol(regions: Sequence[Region]) -> float:
    x0, y0, x1, y1 = _bbox(regions)
    return 1e-9 * math.hypot(x1 - x0, y1 - y0)


def adjacency_pairs(regions: Sequence[Region], snap_tol: float | None = None) -> set[frozenset[str]]:
    """Unordered id pairs whose boundaries share a segment of positive length.

    Coordinates are snapped to a ``snap_tol`` grid first; corner-only contact
    does not count.
    """
    if len(regions) < 2:
        return set()
    if snap_tol is None:
        snap_tol = default_snap_tol(regions)
    geoms = [r.to_shapely() for r in regions]
    if snap_tol > 0:
        geoms = [shapely.set_precision(g, snap_tol) for g in geoms]
    boundaries = [g.boundary for g in geoms]
    tree = shapely.STRtree(geoms)
    left, right = tree.query(geoms, predicate="intersects")
    pairs = set()
    for i, j in zip(left.tolist(), right.tolist()):
        if i >= j:
            continue
        shared = boundaries[i].intersection(boundaries[j])
        if shared.length > 0:
            pairs.add(frozenset((regions[i].id, regions[j].id)))
    return pairs


def adjacency_index(regions: Sequence[Region], pairs: Iterable[frozenset[str]]) -> set[tuple[int, int]]:
    """Translate id pairs into sorted index pairs over ``regions``."""
    pos = {r.id: i for i, r in enumerate(regions)}
    out = set()
    for p in pairs:
        a, b = tuple(p)
        if a not in pos or b not in pos:
            raise DatasetError(f"adjacency references unknown id in {sorted(p)}")
        i, j = sorted((pos[a], pos[b]))
        out.add((i, j))
    return out


def derive_scale(regions: Sequence[Region], page_width_mm: float = 200.0) -> MapScale:
    if not regions:
        raise ConfigError("cannot derive a scale from zero regions")
    if not page_width_mm > 0:
        raise ConfigError(f"page_width_mm must be > 0, got {page_width_mm!r}")
    x0, _, x1, _ = _bbox(regions)
    width = x1 - x0
    if width <= 0:
        raise ConfigError("regions have a zero-width bounding box")
    return MapScale(width / page_width_mm)

