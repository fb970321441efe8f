"""Elastic-beam finite elements: element and global stiffness, linear solve.

Each graph node carries three DOFs (dx, dy, theta) at global indices
3i, 3i+1, 3i+2. Beams are 2D Euler-Bernoulli frame elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConfigError, SolverError
from .graph import ProximityGraph

COND_LIMIT = 1e14
RESIDUAL_TOL = 1e-10
MAX_REFINE = 5


@dataclass(frozen=True)
class BeamParams:
    """Material parameters shared by every beam.

    ``regularization_lambda=None`` anchors each translational DOF with
    ``lambda_rel`` times the mean diagonal of the assembled matrix.
    """

    axial_A: float = 1.0
    inertia_I: float = 1.0
    elasticity_E: float = 10.0
    e0: float = 10.0
    regularization_lambda: float | None = None
    lambda_rel: float = 1e-6

    def __post_init__(self):
        for name in ("axial_A", "inertia_I", "elasticity_E", "e0"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ConfigError(f"{name} must be finite and > 0, got {v!r}")
        lam = self.regularization_lambda
        if lam is not None and not lam >= 0:
            raise ConfigError(f"regularization_lambda must be >= 0, got {lam!r}")
        if not self.lambda_rel >= 0:
            raise ConfigError(f"lambda_rel must be >= 0, got {self.lambda_rel!r}")


class NodeLoad(NamedTuple):
    fx: float
    fy: float
    moment: float = 0.0


class NodeDisplacement(NamedTuple):
    dx: float
    dy: float
    theta: float


def element_stiffness(length_l: float, angle_alpha: float, params: BeamParams) -> np.ndarray:
    """6x6 global-frame stiffness of one beam, ordered (dx1, dy1, th1, dx2, dy2, th2)."""
    if not length_l > 0:
        raise SolverError(f"degenerate beam of length {length_l!r}")
    A, I, l = params.axial_A, params.inertia_I, length_l
    c, s = math.cos(angle_alpha), math.sin(angle_alpha)
    b = 12.0 * I / l**2
    m = 6.0 * I / l
    xx = A * c * c + b * s * s
    yy = A * s * s + b * c * c
    xy = (A - b) * c * s
    k = np.array([
        [xx, xy, -m * s, -xx, -xy, -m * s],
        [xy, yy, m * c, -xy, -yy, m * c],
        [-m * s, m * c, 4 * I, m * s, -m * c, 2 * I],
        [-xx, -xy, m * s, xx, xy, m * s],
        [-xy, -yy, -m * c, xy, yy, -m * c],
        [-m * s, m * c, 2 * I, m * s, -m * c, 4 * I],
    ])
    return (params.elasticity_E / l) * k


def _node_xy(graph: ProximityGraph, length_scale: float) -> np.ndarray:
    return np.array([c.center for c in graph.nodes], dtype=float).reshape(-1, 2) / length_scale


def assemble_global(graph: ProximityGraph, params: BeamParams, length_scale: float = 1.0) -> sp.csc_matrix:
    """Scatter every edge's element matrix into the 3N x 3N system.

    Node coordinates are divided by ``length_scale`` first, so beams can be
    assembled in graphic units independent of the map's units.
    """
    xy = _node_xy(graph, length_scale)
    n = len(xy)
    rows, cols, vals = [], [], []
    for idx, e in enumerate(sorted(graph.edges, key=lambda e: (e.a, e.b))):
        d = xy[e.b] - xy[e.a]
        l = math.hypot(d[0], d[1])
        if l == 0.0:
            raise SolverError(f"edge {idx} ({e.a}, {e.b}) joins coincident centres")
        ke = element_stiffness(l, math.atan2(d[1], d[0]), params)
        dofs = np.r_[3 * e.a : 3 * e.a + 3, 3 * e.b : 3 * e.b + 3]
        r, c = np.meshgrid(dofs, dofs, indexing="ij")
        rows.append(r.ravel())
        cols.append(c.ravel())
        vals.append(ke.ravel())
    if rows:
        K = sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(3 * n, 3 * n)
        ).tocsc()
    else:
        K = sp.csc_matrix((3 * n, 3 * n))
    lam = params.regularization_lambda
    if lam is None:
        diag = K.diagonal()
        lam = params.lambda_rel * (diag.mean() if diag.size and diag.any() else params.elasticity_E)
    if lam > 0:
        anchor = np.zeros(3 * n)
        anchor[0::3] = lam
        anchor[1::3] = lam
        K = (K + sp.diags(anchor)).tocsc()
    K.sum_duplicates()
    return K


def _cond1_estimate(K: sp.csc_matrix, lu) -> float:
    n = K.shape[0]
    inv = spla.LinearOperator((n, n), matvec=lu.solve, rmatvec=lambda x: lu.solve(x, trans="T"), dtype=float)
    return float(spla.onenormest(K) * spla.onenormest(inv))


def solve_displacements(stiffness, loads, iteration: int | None = None) -> np.ndarray:
    """Solve K d = f. Returns an (n, 3) array of (dx, dy, theta) rows."""
    K = sp.csc_matrix(stiffness)
    f = np.asarray(loads, dtype=float).reshape(-1)
    if f.size != K.shape[0]:
        raise SolverError(f"{f.size} load entries for a {K.shape[0]}-DOF system", iteration)
    where = f" at iteration {iteration}" if iteration is not None else ""
    if not f.any():
        return np.zeros((f.size // 3, 3))
    try:
        lu = spla.splu(K)
    except RuntimeError as exc:
        raise SolverError(f"singular stiffness matrix{where}: {exc}", iteration) from None
    cond = _cond1_estimate(K, lu)
    if not cond <= COND_LIMIT:
        raise SolverError(f"ill-conditioned stiffness matrix{where} (cond ~ {cond:.3g})", iteration)
    d = lu.solve(f)
    knorm = spla.norm(K, 1)
    fnorm = np.abs(f).sum()

    def backward_error(x):
        # Normwise backward error; a plain ||r||/||f|| cannot go below
        # machine precision times the condition number.
        return np.abs(K @ x - f).sum() / (knorm * np.abs(x).sum() + fnorm)

    res = backward_error(d)
    for _ in range(MAX_REFINE):
        if res <= RESIDUAL_TOL:
            break
        d += lu.solve(f - K @ d)
        res = backward_error(d)
    if not res <= RESIDUAL_TOL:
        raise SolverError(f"residual {res:.3g} above {RESIDUAL_TOL:g}{where}", iteration)
    return d.reshape(-1, 3)


def as_displacements(d: np.ndarray) -> list[NodeDisplacement]:
    return [NodeDisplacement(*map(float, row)) for row in np.asarray(d).reshape(-1, 3)]


def update_elasticity(params: BeamParams, max_d0: float, max_fk: float) -> BeamParams:
    """E = max_d0 / max_fk * e0; everything else unchanged."""
    if not max_fk > 0:
        raise ValueError("max_fk must be > 0; the caller should have stopped on the force threshold")
    return replace(params, elasticity_E=max_d0 / max_fk * params.e0)


def self_equilibrate(xy: np.ndarray, forces: np.ndarray) -> np.ndarray:
    """Remove net force and net moment from translational nodal loads.

    A free-floating frame can only answer an unbalanced load with rigid
    motion. Subtracting a uniform translation field and a rigid rotation
    field (about the node centroid) leaves the part of the load that
    actually deforms the beams.
    """
    F = np.array(forces, dtype=float).reshape(-1, 2)
    n = len(F)
    if n == 0:
        return F
    F -= F.mean(axis=0)
    r = np.asarray(xy, dtype=float).reshape(-1, 2)
    r = r - r.mean(axis=0)
    w = np.column_stack([-r[:, 1], r[:, 0]])
    ww = (w * w).sum()
    if ww > 0:
        F -= ((F * w).sum() / ww) * w
    return F


def loads_vector(forces: np.ndarray) -> np.ndarray:
    """Pack (n, 2) nodal forces into a 3n load vector with zero moments."""
    F = np.asarray(forces, dtype=float).reshape(-1, 2)
    out = np.zeros(3 * len(F))
    out[0::3] = F[:, 0]
    out[1::3] = F[:, 1]
    return out


def dump_matrix(stiffness, path) -> None:
    """Write the matrix in coordinate format: one ``row col value`` per line."""
    K = sp.coo_matrix(stiffness)
    with open(path, "w") as fh:
        fh.write(f"{K.shape[0]} {K.shape[1]} {K.nnz}\n")
        for r, c, v in sorted(zip(K.row.tolist(), K.col.tolist(), K.data.tolist())):
            fh.write(f"{r} {c} {v:.17g}\n")


def max_norm(rows: np.ndarray) -> float:
    rows = np.asarray(rows, dtype=float)
    if rows.size == 0:
        return 0.0
    return float(np.hypot(rows[:, 0], rows[:, 1]).max())

