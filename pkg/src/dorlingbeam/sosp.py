"""Sequential one-circle-at-a-time displacement, used as a comparison baseline.

This is a reconstruction of the classic "orbits of stars and planets"
procedure. Its constants are reconstruction choices, not published values:

* circles are visited in ascending region-id order every sweep;
* a circle's move is the damped sum of its repulsion shares from every
  circle it overlaps plus the mean of its attraction shares toward
  region-adjacent separated circles (same share rule as the beam engine);
  averaging the pulls stands in for border-length weighting and keeps a
  small circle with many neighbours from overshooting;
* attraction is only applied during the first T_s' sweeps and honours the
  long-edge threshold, mirroring the beam engine so comparisons are fair;
* overlapping pairs are pushed apart to the engine's clearance gap
  (epsilon/2 by default) rather than to exact tangency;
* the run stops when no circle moves more than epsilon in a sweep and no
  pair overlaps, or after T_s sweeps.
"""

from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np

from .circles import Circle
from .engine import EngineConfig
from .errors import ConfigError
from .geo import Region, adjacency_pairs

log = logging.getLogger(__name__)

DEFAULT_DAMPING = 0.5


def _neighbours(ids: list, adjacency) -> list[list[int]]:
    pos = {rid: i for i, rid in enumerate(ids)}
    out: list[list[int]] = [[] for _ in ids]
    for pair in adjacency:
        a, b = tuple(pair)
        if a in pos and b in pos:
            out[pos[a]].append(pos[b])
            out[pos[b]].append(pos[a])
    return [sorted(n) for n in out]


def _move_for(
    i: int, xy: np.ndarray, radii: np.ndarray, nbrs: list[int], attract: bool, t_l: float, clearance: float
) -> np.ndarray:
    d = xy[i] - xy  # vectors from every circle to circle i
    dist = np.hypot(d[:, 0], d[:, 1])
    gaps = dist - radii[i] - radii
    gaps[i] = math.inf
    share = radii / (radii[i] + radii)
    move = np.zeros(2)
    for j in np.flatnonzero(gaps < 0):
        if dist[j] == 0.0:
            u = np.array([1.0, 0.0])
        else:
            u = d[j] / dist[j]
        move += u * ((clearance - gaps[j]) * share[j])
    if attract:
        pull = [d[j] / dist[j] * (gaps[j] * share[j]) for j in nbrs if 0 < gaps[j] <= t_l]
        if pull:
            move -= np.mean(pull, axis=0)
    return move


def _any_overlap(xy: np.ndarray, radii: np.ndarray) -> bool:
    d = xy[:, None, :] - xy[None, :, :]
    gaps = np.hypot(d[..., 0], d[..., 1]) - radii[:, None] - radii[None, :]
    np.fill_diagonal(gaps, math.inf)
    return bool((gaps < 0).any())


def run_sosp(
    regions: Sequence[Region] | None,
    circles: Sequence[Circle],
    cfg: EngineConfig,
    adjacency=None,
    damping: float = DEFAULT_DAMPING,
) -> tuple[list[Circle], int]:
    """Displace circles one by one; returns (final circles, sweeps performed)."""
    cfg.validate()
    if not 0 < damping <= 1:
        raise ConfigError(f"damping must lie in (0, 1], got {damping!r}")
    circles = list(circles)
    if not circles:
        return circles, 0
    if adjacency is None:
        adjacency = adjacency_pairs(regions) if regions else set()
    order = sorted(range(len(circles)), key=lambda i: str(circles[i].region_id))
    nbrs = _neighbours([c.region_id for c in circles], adjacency)
    xy = np.array([c.center for c in circles], dtype=float)
    radii = np.array([c.radius for c in circles], dtype=float)
    t_s, t_sp = cfg.steps_for(len(circles))
    t_l = cfg.force_cfg.t_l_mm * cfg.units_per_mm
    clearance = cfg.repulsion_clearance

    sweeps = 0
    for sweep in range(1, t_s + 1):
        sweeps = sweep
        attract = cfg.force_cfg.attract_enabled and sweep <= t_sp
        largest = 0.0
        for i in order:
            step = damping * _move_for(i, xy, radii, nbrs[i], attract, t_l, clearance)
            xy[i] += step
            largest = max(largest, math.hypot(step[0], step[1]))
        if largest <= cfg.epsilon and not _any_overlap(xy, radii):
            break
    else:
        log.info("baseline stopped at the sweep limit T_s=%d", t_s)

    return [c.moved_to(tuple(p)) for c, p in zip(circles, xy.tolist())], sweeps
