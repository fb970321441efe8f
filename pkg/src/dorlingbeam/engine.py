"""Iterative elastic-beam displacement of circles."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Literal, NamedTuple, Sequence

import numpy as np

from .beams import (
    BeamParams,
    assemble_global,
    loads_vector,
    max_norm,
    self_equilibrate,
    solve_displacements,
    update_elasticity,
)
from .circles import Circle
from .errors import ConfigError, SolverError
from .forces import ForceConfig, combined_forces
from .geo import Region, adjacency_pairs
from .graph import get_strategy

log = logging.getLogger(__name__)


# Anchor weight used by the engine. A near-zero anchor lets the frame's soft
# global bending modes dominate and the solved motion stops following the
# loads; 0.3 of the mean diagonal keeps the response local.
ENGINE_LAMBDA_REL = 0.3


def default_steps(num_circles: int) -> tuple[int, int]:
    """(T_s, T_s') = (4n, 2n) with n clamped to at least 10."""
    if num_circles < 1:
        raise ConfigError("need at least one circle")
    n = max(num_circles, 10)
    return 4 * n, 2 * n


@dataclass(frozen=True)
class EngineConfig:
    """Loop settings. ``t_s``/``t_s_prime`` of ``None`` derive from the circle count.

    ``clearance`` (map units, default epsilon/2) is the gap repulsion aims
    for, so separated pairs do not stall a hair inside each other.

    ``elasticity_schedule``:
      * ``"recalibrate"`` - every step solves once at E0, then rescales E so
        the largest nodal displacement equals the largest combined force;
      * ``"literal"`` - step 1 applies the E0 solution as is and later steps
        use max(d_0) from step 1 against the current max force.
    """

    epsilon: float = 0.001
    t_s: int | None = None
    t_s_prime: int | None = None
    graph_strategy: str = "algorithm2"
    force_cfg: ForceConfig = field(default_factory=ForceConfig)
    beam_params: BeamParams = field(default_factory=lambda: BeamParams(lambda_rel=ENGINE_LAMBDA_REL))
    units_per_mm: float = 1.0
    elasticity_schedule: Literal["recalibrate", "literal"] = "recalibrate"
    equilibrate_loads: bool = False
    clearance: float | None = None

    @property
    def repulsion_clearance(self) -> float:
        return 0.5 * self.epsilon if self.clearance is None else self.clearance

    def steps_for(self, num_circles: int) -> tuple[int, int]:
        d_ts, d_tsp = default_steps(num_circles)
        t_s = d_ts if self.t_s is None else self.t_s
        t_sp = d_tsp if self.t_s_prime is None else self.t_s_prime
        if not 0 < t_sp <= t_s:
            raise ConfigError(f"need 0 < t_s_prime <= t_s, got {t_sp}, {t_s}")
        return t_s, t_sp

    def validate(self) -> None:
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon!r}")
        if not self.units_per_mm > 0:
            raise ConfigError("units_per_mm must be > 0")
        if self.clearance is not None and not 0 <= self.clearance < self.epsilon:
            raise ConfigError(f"clearance must lie in [0, epsilon), got {self.clearance!r}")
        if self.elasticity_schedule not in ("recalibrate", "literal"):
            raise ConfigError(f"unknown elasticity schedule {self.elasticity_schedule!r}")
        get_strategy(self.graph_strategy)


@dataclass(frozen=True)
class IterationTrace:
    step: int
    max_force: float
    max_displacement: float
    attract_active: bool
    elasticity: float = math.nan
    edge_count: int = 0
    converged: bool = False


class RunResult(NamedTuple):
    circles: list[Circle]
    trace: list[IterationTrace]


def _centers(circles: Sequence[Circle]) -> np.ndarray:
    return np.array([c.center for c in circles], dtype=float).reshape(-1, 2)


def run(
    regions: Sequence[Region] | None,
    circles: Sequence[Circle],
    cfg: EngineConfig,
    adjacency=None,
    progress: Callable[[IterationTrace], None] | None = None,
) -> RunResult:
    """Displace circles until the combined forces vanish or T_s is reached.

    Each step rebuilds the proximity graph, computes forces (attraction only
    up to T_s'), combines them per node, solves the beam structure and moves
    every centre by its (dx, dy). Radii are never changed.
    """
    cfg.validate()
    circles = list(circles)
    if adjacency is None:
        adjacency = adjacency_pairs(regions) if regions else set()
    t_s, t_sp = cfg.steps_for(max(len(circles), 1))
    build = get_strategy(cfg.graph_strategy)
    upmm = cfg.units_per_mm
    params = cfg.beam_params
    trial_params = replace(params, elasticity_E=params.e0)
    max_d0 = None
    trace: list[IterationTrace] = []

    for step in range(1, t_s + 1):
        graph = build(circles, adjacency)
        attract = cfg.force_cfg.attract_enabled and step <= t_sp
        fcfg = replace(cfg.force_cfg, attract_enabled=attract)
        F = combined_forces(graph, fcfg, upmm, cfg.repulsion_clearance)
        max_f = max_norm(F)
        overlapping = any(e.length < 0 for e in graph.edges)
        if max_f <= cfg.epsilon and not overlapping:
            rec = IterationTrace(step, max_f, 0.0, attract, math.nan, len(graph.edges), converged=True)
            trace.append(rec)
            if progress:
                progress(rec)
            break

        xy = _centers(circles)
        F_mm = F / upmm
        if cfg.equilibrate_loads:
            F_mm = self_equilibrate(xy / upmm, F_mm)
        f = loads_vector(F_mm)
        max_f_mm = max_f / upmm
        try:
            d_trial = solve_displacements(assemble_global(graph, trial_params, upmm), f, step)
            max_trial = max_norm(d_trial)
            if cfg.elasticity_schedule == "literal" and step == 1:
                max_d0 = max_trial
                E, d = params.e0, d_trial
            elif max_trial == 0.0:
                E, d = params.e0, d_trial
            else:
                ref = max_d0 if cfg.elasticity_schedule == "literal" else max_trial
                stepped = update_elasticity(params, ref, max_f_mm)
                E = stepped.elasticity_E
                d = solve_displacements(assemble_global(graph, stepped, upmm), f, step)
        except SolverError as exc:
            exc.iteration = step
            exc.trace = list(trace)
            raise

        disp = d[:, :2] * upmm
        circles = [c.moved_to(p) for c, p in zip(circles, xy + disp)]
        rec = IterationTrace(step, max_f, max_norm(disp), attract, E, len(graph.edges))
        trace.append(rec)
        if progress:
            progress(rec)
    else:
        log.info("stopped at the step limit T_s=%d", t_s)

    return RunResult(circles, trace)


def stop_condition(trace: Sequence[IterationTrace]) -> str:
    """'force' if the last step met the force threshold, else 'steps'."""
    return "force" if trace and trace[-1].converged else "steps"
