"""Command-line front end: ingest, size, displace, measure, write outputs."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from . import circles as circ
from . import engine, geo, graph, metrics, render, sosp
from .errors import ConfigError, DatasetError, SolverError
from .forces import ForceConfig

log = logging.getLogger("dorlingbeam")

EXIT_OK, EXIT_CONFIG, EXIT_DATASET, EXIT_SOLVER = 0, 2, 3, 4
DEFAULT_TR_MM = 8.0


@dataclass(frozen=True)
class RunManifest:
    input_path: str
    value_field: str
    algorithm: str = "beam"
    graph: str = "algorithm2"
    t_r_mm: float = DEFAULT_TR_MM
    t_l_mm: float = math.inf
    page_width_mm: float = 200.0
    epsilon: float = 0.001
    damping: float = sosp.DEFAULT_DAMPING
    id_field: str | None = None
    out_svg: str | None = None
    out_features: str | None = None
    out_metrics: str | None = None
    deterministic: bool = True  # there is no randomness to seed

    def validate(self) -> None:
        outs = [p for p in (self.out_svg, self.out_features, self.out_metrics) if p]
        resolved = [Path(p).resolve() for p in outs]
        if len(set(resolved)) != len(resolved):
            raise ConfigError("output paths must be distinct")
        if Path(self.input_path).resolve() in resolved:
            raise ConfigError("an output path would overwrite the input")
        if self.algorithm not in ("beam", "sosp"):
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if not self.page_width_mm > 0:
            raise ConfigError("page width must be > 0")
        if not self.t_r_mm >= 0:
            raise ConfigError("T_r must be >= 0")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be > 0")


def _tl(text: str) -> float:
    if text.strip().lower() in ("none", "inf", "infinity"):
        return math.inf
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected millimetres or 'none', got {text!r}") from None
    if not v >= 0:
        raise argparse.ArgumentTypeError("T_l must be >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dorlingbeam",
        description="Build a circular cartogram (Dorling map) from polygons and values.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p.add_argument("--input", required=True, help="GeoJSON feature collection of (multi)polygons")
    p.add_argument("--value", required=True, help="numeric property holding each region's value")
    p.add_argument("--id-field", default=None, help="property used as region id; feature id when unset")
    p.add_argument("--algorithm", choices=["beam", "sosp"], default="beam", help="displacement method")
    p.add_argument("--graph", choices=["algorithm2", "mst"], default="algorithm2", help="proximity graph")
    p.add_argument("--tr", type=float, default=DEFAULT_TR_MM, help="target gap T_r for circle sizing, mm")
    p.add_argument("--tl", type=_tl, default="none", help="long-edge limit T_l for attraction, mm or 'none'")
    p.add_argument("--page-width", type=float, default=200.0, help="page width the map is drawn at, mm")
    p.add_argument("--epsilon", type=float, default=0.001, help="force threshold for convergence, map units")
    p.add_argument("--damping", type=float, default=sosp.DEFAULT_DAMPING, help="step damping of the sosp baseline")
    p.add_argument("--out-svg", default=None, help="write the cartogram as SVG")
    p.add_argument("--out-features", default=None, help="write circles as a point feature collection")
    p.add_argument("--out-metrics", default=None, help="write metrics (.json structured, else key: value)")
    p.add_argument("--verbose", "-v", action="store_true", help="log every iteration")
    return p


def manifest_from_args(args: argparse.Namespace) -> RunManifest:
    return RunManifest(
        input_path=args.input,
        value_field=args.value,
        algorithm=args.algorithm,
        graph=args.graph,
        t_r_mm=args.tr,
        t_l_mm=args.tl,
        page_width_mm=args.page_width,
        epsilon=args.epsilon,
        damping=args.damping,
        id_field=args.id_field,
        out_svg=args.out_svg,
        out_features=args.out_features,
        out_metrics=args.out_metrics,
    )


def _write_metrics(path: str, report: metrics.MetricsReport, extra: dict) -> None:
    """Requested format at ``path`` plus the other format as a sibling."""
    path = Path(path)
    report.write(path)
    if path.suffix.lower() == ".json":
        doc = json.loads(path.read_text())
        doc.update(extra)
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        path.with_suffix(".txt").write_text(report.to_text())
    else:
        doc = dict(report.as_dict(), **extra)
        path.with_suffix(".json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def execute(m: RunManifest) -> metrics.MetricsReport:
    """Run one manifest end to end and write its outputs."""
    m.validate()
    regions = geo.load_regions(m.input_path, m.value_field, m.id_field)
    if len(regions) < 2:
        raise DatasetError(f"{m.input_path}: need at least 2 regions, found {len(regions)}")
    adjacency = geo.adjacency_pairs(regions)
    scale = geo.derive_scale(regions, m.page_width_mm)
    log.info("%d regions, %d adjacent pairs, %.6g map units per mm", len(regions), len(adjacency), scale.units_per_mm)

    cfg = engine.EngineConfig(
        epsilon=m.epsilon,
        graph_strategy=m.graph,
        force_cfg=ForceConfig(t_l_mm=m.t_l_mm),
        units_per_mm=scale.units_per_mm,
    )
    cfg.validate()
    t0 = time.perf_counter()
    start = circ.generate_initial_circles(regions, circ.RadiusSearchConfig(t_r_mm=m.t_r_mm), scale)
    g0 = graph.get_strategy(m.graph)(start, adjacency)
    extra: dict = {"units_per_mm": scale.units_per_mm, "manifest": {k: (None if v == math.inf else v) for k, v in asdict(m).items()}}

    if m.algorithm == "beam":
        def progress(t: engine.IterationTrace) -> None:
            log.debug("step %d  max|f| %.6g  max|d| %.6g  attract %s", t.step, t.max_force, t.max_displacement, t.attract_active)

        try:
            final, trace = engine.run(regions, start, cfg, adjacency, progress=progress)
        except SolverError as exc:
            if m.out_metrics:
                partial = {"error": str(exc), "iteration": exc.iteration, "trace": [asdict(t) for t in exc.trace]}
                Path(m.out_metrics).write_text(json.dumps(partial, indent=2, default=str) + "\n")
            raise
        n_attract = sum(t.attract_active for t in trace)
        n_total = len(trace)
        extra["stop_condition"] = engine.stop_condition(trace)
    else:
        final, n_total = sosp.run_sosp(regions, start, cfg, adjacency, damping=m.damping)
        n_attract = min(n_total, cfg.steps_for(len(start))[1])
    elapsed = time.perf_counter() - t0

    report = metrics.evaluate(start, final, g0, adjacency, scale, n_attract, n_total, elapsed, m.algorithm)
    if m.out_svg:
        Path(m.out_svg).write_text(render.render_svg(final, regions))
    if m.out_features:
        values = {r.id: r.value for r in regions}
        Path(m.out_features).write_text(render.dumps_features(render.export_features(final, values)))
    if m.out_metrics:
        _write_metrics(m.out_metrics, report, extra)
    return report


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        report = execute(manifest_from_args(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DatasetError as exc:
        print(f"dataset error: {exc}", file=sys.stderr)
        return EXIT_DATASET
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    sys.stdout.write(metrics.comparison_table({report.algorithm: report}))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
