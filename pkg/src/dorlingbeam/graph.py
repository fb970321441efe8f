"""Typed proximity graphs over circles.

Two strategies ship: the adjacency/overlap/connectivity construction
(``"algorithm2"``) and a gap-weighted minimum spanning tree plus overlap
edges (``"mst"``). Further builders can be added to ``STRATEGIES``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import IntEnum
from typing import Callable, Iterable, Sequence

import numpy as np

from .circles import Circle, gap_matrix
from .errors import ConfigError

Adjacency = Iterable[frozenset]


class EdgeType(IntEnum):
    TYPE1 = 1  # regions adjacent
    TYPE2 = 2  # regions not adjacent


@dataclass(frozen=True)
class GraphEdge:
    a: int
    b: int
    edge_type: EdgeType
    length: float


@dataclass(frozen=True)
class ProximityGraph:
    nodes: tuple[Circle, ...]
    edges: tuple[GraphEdge, ...]
    strategy: str = "algorithm2"

    def components(self) -> list[list[int]]:
        uf = _UnionFind(len(self.nodes))
        for e in self.edges:
            uf.union(e.a, e.b)
        groups: dict[int, list[int]] = {}
        for i in range(len(self.nodes)):
            groups.setdefault(uf.find(i), []).append(i)
        return list(groups.values())

    def edge_pairs(self) -> set[tuple[int, int]]:
        return {(e.a, e.b) for e in self.edges}

    def to_features(self) -> dict:
        """Edges as LineString features, for visual debugging."""
        feats = []
        for e in self.edges:
            pa, pb = self.nodes[e.a].center, self.nodes[e.b].center
            feats.append({
                "type": "Feature",
                "properties": {
                    "a": self.nodes[e.a].region_id,
                    "b": self.nodes[e.b].region_id,
                    "edge_type": int(e.edge_type),
                    "length": e.length,
                },
                "geometry": {"type": "LineString", "coordinates": [list(pa), list(pb)]},
            })
        return {"type": "FeatureCollection", "features": feats}

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_features(), fh)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return False
        self.parent[max(ri, rj)] = min(ri, rj)
        return True


def _arrays(circles):
    centers = np.array([c.center for c in circles], dtype=float).reshape(-1, 2)
    radii = np.array([c.radius for c in circles], dtype=float)
    return centers, radii


def _adjacent_index_pairs(circles, adjacency) -> set[tuple[int, int]]:
    pos = {c.region_id: i for i, c in enumerate(circles)}
    out = set()
    for pair in adjacency:
        a, b = tuple(pair)
        if a in pos and b in pos and a != b:
            i, j = sorted((pos[a], pos[b]))
            out.add((i, j))
    return out


def _sorted_candidates(circles, gaps):
    """Upper-triangle pairs ordered by (gap, smaller id, larger id)."""
    n = len(circles)
    iu, ju = np.triu_indices(n, 1)
    ids = [c.region_id for c in circles]
    keys = []
    for i, j in zip(iu.tolist(), ju.tolist()):
        lo, hi = sorted((ids[i], ids[j]))
        keys.append((gaps[i, j], lo, hi, i, j))
    keys.sort()
    return [(k[3], k[4]) for k in keys]


def _make_graph(circles, pairs, adjacent, gaps, strategy):
    edges = tuple(
        GraphEdge(i, j, EdgeType.TYPE1 if (i, j) in adjacent else EdgeType.TYPE2, float(gaps[i, j]))
        for i, j in sorted(pairs)
    )
    return ProximityGraph(tuple(circles), edges, strategy)


def build_graph(circles: Sequence[Circle], adjacency: Adjacency) -> ProximityGraph:
    """Adjacency edges, then overlap edges, then min-gap bridges until connected."""
    circles = list(circles)
    centers, radii = _arrays(circles)
    gaps = gap_matrix(centers, radii)
    adjacent = _adjacent_index_pairs(circles, adjacency)
    pairs = set(adjacent)
    n = len(circles)
    iu, ju = np.nonzero(np.triu(gaps < 0, 1))
    pairs.update(zip(iu.tolist(), ju.tolist()))

    uf = _UnionFind(n)
    for i, j in pairs:
        uf.union(i, j)
    n_groups = len({uf.find(i) for i in range(n)})
    if n_groups > 1:
        # Repeatedly adding the global min-gap cross-component edge is
        # Kruskal's scan continued from the current components.
        for i, j in _sorted_candidates(circles, gaps):
            if uf.union(i, j):
                pairs.add((i, j))
                n_groups -= 1
                if n_groups == 1:
                    break
    return _make_graph(circles, pairs, adjacent, gaps, "algorithm2")


def build_mst_graph(circles: Sequence[Circle], adjacency: Adjacency) -> ProximityGraph:
    """Gap-weighted minimum spanning tree plus every overlapping pair."""
    circles = list(circles)
    centers, radii = _arrays(circles)
    gaps = gap_matrix(centers, radii)
    adjacent = _adjacent_index_pairs(circles, adjacency)
    n = len(circles)
    uf = _UnionFind(n)
    pairs = set()
    for i, j in _sorted_candidates(circles, gaps):
        if uf.union(i, j):
            pairs.add((i, j))
            if len(pairs) == n - 1:
                break
    iu, ju = np.nonzero(np.triu(gaps < 0, 1))
    pairs.update(zip(iu.tolist(), ju.tolist()))
    return _make_graph(circles, pairs, adjacent, gaps, "mst")


STRATEGIES: dict[str, Callable[[Sequence[Circle], Adjacency], ProximityGraph]] = {
    "algorithm2": build_graph,
    "mst": build_mst_graph,
}


def get_strategy(name: str):
    try:
        return STRATEGIES[name]
    except KeyError:
        raise ConfigError(f"unknown graph strategy {name!r}; choose from {sorted(STRATEGIES)}") from None


def refresh(graph: ProximityGraph, circles: Sequence[Circle], adjacency: Adjacency) -> ProximityGraph:
    """Rebuild with the graph's own strategy on the current circle positions."""
    return get_strategy(graph.strategy)(circles, adjacency)
