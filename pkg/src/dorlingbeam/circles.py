"""Initial circles: value-to-radius mapping and the R_max search."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, replace
from typing import Literal, Sequence

import numpy as np

from .errors import ConfigError
from .geo import MapScale, Region, centroid

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Circle:
    region_id: str
    center: tuple[float, float]
    radius: float
    original_center: tuple[float, float]

    def __post_init__(self):
        if not self.radius > 0:
            raise ConfigError(f"circle {self.region_id!r}: radius must be > 0, got {self.radius!r}")

    def moved_to(self, center) -> "Circle":
        return replace(self, center=(float(center[0]), float(center[1])))


@dataclass(frozen=True)
class RadiusSearchConfig:
    """Graphic-millimetre settings for the R_max search.

    ``pairing="pairs"`` ranks all unordered circle pairs by gap;
    ``"nearest"`` uses each circle's nearest-neighbour gap instead.
    """

    t_r_mm: float = 0.0
    r_min_mm: float = 0.1
    r_max_init_mm: float = 50.0
    stop_tol_mm: float = 0.01
    max_iters: int = 100
    pairing: Literal["pairs", "nearest"] = "pairs"

    def validate(self) -> None:
        if not 0 < self.r_min_mm < self.r_max_init_mm:
            raise ConfigError("need 0 < r_min_mm < r_max_init_mm")
        if not self.stop_tol_mm > 0:
            raise ConfigError("stop_tol_mm must be > 0")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be >= 1")
        if self.pairing not in ("pairs", "nearest"):
            raise ConfigError(f"unknown pairing {self.pairing!r}")


def radius_for_value(v: float, v_min: float, v_max: float, r_min: float, r_max: float) -> float:
    if v_max == v_min:
        warnings.warn("all values equal; every circle gets the mid radius", stacklevel=2)
        return (r_min + r_max) / 2.0
    return math.sqrt((v - v_min) / (v_max - v_min)) * (r_max - r_min) + r_min


def pairwise_gap(a: Circle, b: Circle) -> float:
    """Centre distance minus radius sum; negative means overlap."""
    return math.hypot(a.center[0] - b.center[0], a.center[1] - b.center[1]) - (a.radius + b.radius)


def gap_matrix(centers: np.ndarray, radii: np.ndarray) -> np.ndarray:
    diff = centers[:, None, :] - centers[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=-1))
    return dist - (radii[:, None] + radii[None, :])


def _ave_min_d_20(centers, radii, pairing="pairs") -> float:
    n = len(radii)
    if n < 2:
        raise ConfigError("need at least 2 circles")
    g = gap_matrix(centers, radii)
    if pairing == "nearest":
        np.fill_diagonal(g, np.inf)
        gaps = np.sort(g.min(axis=1))
    else:
        gaps = np.sort(g[np.triu_indices(n, 1)])
    k = math.ceil(0.2 * len(gaps))
    return float(gaps[:k].mean())


def ave_min_d_20(circles: Sequence[Circle], pairing: str = "pairs") -> float:
    """Mean gap over the closest 20% (rounded up) of circle pairs."""
    centers = np.array([c.center for c in circles], dtype=float).reshape(-1, 2)
    radii = np.array([c.radius for c in circles], dtype=float)
    return _ave_min_d_20(centers, radii, pairing)


def _radius_shares(values: np.ndarray) -> np.ndarray | None:
    v_min, v_max = values.min(), values.max()
    if v_max == v_min:
        return None
    return np.sqrt((values - v_min) / (v_max - v_min))


def _radii(shares, r_min, r_max, n):
    if shares is None:
        return np.full(n, (r_min + r_max) / 2.0)
    return shares * (r_max - r_min) + r_min


def generate_initial_circles(
    regions: Sequence[Region], cfg: RadiusSearchConfig, scale: MapScale
) -> list[Circle]:
    """Centre one circle per region and bisect R_max toward the target gap.

    The closest-20% mean gap falls monotonically as R_max grows, so a
    bracket [lo, hi] with gap(lo) >= T_r >= gap(hi) is narrowed by halving
    until the gap is within ``stop_tol_mm`` of T_r.
    """
    cfg.validate()
    if len(regions) < 2:
        raise ConfigError("need at least 2 regions to size circles")
    values = np.array([r.value for r in regions], dtype=float)
    centers = np.array([centroid(r) for r in regions], dtype=float)
    shares = _radius_shares(values)
    if shares is None:
        warnings.warn("all values equal; every circle gets the mid radius", stacklevel=2)
    n = len(regions)
    r_min = scale.to_map(cfg.r_min_mm)
    target = scale.to_map(cfg.t_r_mm)
    tol = scale.to_map(cfg.stop_tol_mm)

    def excess(r_max):
        return _ave_min_d_20(centers, _radii(shares, r_min, r_max, n), cfg.pairing) - target

    lo, hi = r_min, scale.to_map(cfg.r_max_init_mm)
    best = hi
    e_hi = excess(hi)
    grown = 0
    while e_hi > tol and grown < 10:
        lo, hi = hi, 2.0 * hi
        e_hi = excess(hi)
        grown += 1
    if grown:
        log.info("widened R_max bracket %d time(s)", grown)

    if e_hi > tol:
        warnings.warn("R_max search: gaps stay above T_r even at the widened upper bound", stacklevel=2)
        best = hi
    elif excess(lo) < -tol:
        warnings.warn("R_max search: gaps fall below T_r even at R_max = R_min", stacklevel=2)
        best = lo
    else:
        best, best_err = hi, abs(e_hi)
        for _ in range(cfg.max_iters):
            mid = 0.5 * (lo + hi)
            e = excess(mid)
            if abs(e) < best_err:
                best, best_err = mid, abs(e)
            if abs(e) <= tol:
                break
            if e > 0:
                lo = mid
            else:
                hi = mid
        else:
            warnings.warn(f"R_max search stopped after {cfg.max_iters} iterations", stacklevel=2)

    radii = _radii(shares, r_min, best, n)
    return [
        Circle(r.id, (float(c[0]), float(c[1])), float(rad), (float(c[0]), float(c[1])))
        for r, c, rad in zip(regions, centers, radii)
    ]
