import math
import time
import warnings
from pathlib import Path

import pytest

from dorlingbeam import circles as circ
from dorlingbeam import engine, geo, graph, sosp
from dorlingbeam.circles import Circle
from dorlingbeam.forces import ForceConfig

DATA = Path(__file__).resolve().parent.parent / "data"
DATASET_A = (DATA / "us48_pop2015.geojson", "POP2015")
DATASET_B = (DATA / "americas_pop.geojson", "POP_EST")
BENCH_TR_MM = 8.0

ACCEPTANCE_LINES: list[str] = []


def make_circle(rid, x, y, r):
    return Circle(str(rid), (float(x), float(y)), float(r), (float(x), float(y)))


def square(x0, y0, size=1.0):
    import numpy as np

    ring = np.array([[x0, y0], [x0 + size, y0], [x0 + size, y0 + size], [x0, y0 + size], [x0, y0]], dtype=float)
    return ((ring,),)


class Bench:
    """Loaded dataset plus cached runs, shared across the session."""

    def __init__(self, path, field):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            self.regions = geo.load_regions(path, field)
        self.adjacency = geo.adjacency_pairs(self.regions)
        self.scale = geo.derive_scale(self.regions)
        t0 = time.perf_counter()
        self.start = circ.generate_initial_circles(self.regions, circ.RadiusSearchConfig(t_r_mm=BENCH_TR_MM), self.scale)
        self.init_seconds = time.perf_counter() - t0
        self.graph0 = graph.build_graph(self.start, self.adjacency)
        self._runs = {}
        self.seconds = {}

    def cfg(self, t_l_mm=math.inf, **kw):
        return engine.EngineConfig(units_per_mm=self.scale.units_per_mm, force_cfg=ForceConfig(t_l_mm=t_l_mm), **kw)

    def beam(self, t_l_mm=math.inf):
        key = ("beam", t_l_mm)
        if key not in self._runs:
            t0 = time.perf_counter()
            self._runs[key] = engine.run(self.regions, self.start, self.cfg(t_l_mm), self.adjacency)
            self.seconds[key] = time.perf_counter() - t0
        return self._runs[key]

    def sosp(self, t_l_mm=math.inf):
        key = ("sosp", t_l_mm)
        if key not in self._runs:
            self._runs[key] = sosp.run_sosp(self.regions, self.start, self.cfg(t_l_mm), self.adjacency)
        return self._runs[key]


@pytest.fixture(scope="session")
def bench_a():
    return Bench(*DATASET_A)


@pytest.fixture(scope="session")
def bench_b():
    return Bench(*DATASET_B)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
