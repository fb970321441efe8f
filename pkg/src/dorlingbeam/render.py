"""Static outputs: SVG cartogram and a point feature collection of circles."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence
from xml.sax.saxutils import escape, quoteattr

from .circles import Circle
from .geo import Region

MARGIN = 0.05


@dataclass(frozen=True)
class SvgStyle:
    width_px: float = 800.0
    fill: str = "#f4a261"
    stroke: str = "#264653"
    ghost: bool = True
    ghost_stroke: str = "#b0b0b0"
    labels: bool = True
    font_px: float = 9.0


def _num(x: float) -> str:
    return format(x, ".10g")


def _extent(circles: Sequence[Circle], regions: Sequence[Region]):
    xs0, ys0, xs1, ys1 = [], [], [], []
    for c in circles:
        x, y = c.center
        xs0.append(x - c.radius)
        ys0.append(y - c.radius)
        xs1.append(x + c.radius)
        ys1.append(y + c.radius)
    for r in regions:
        x0, y0, x1, y1 = r.bounds
        xs0.append(x0)
        ys0.append(y0)
        xs1.append(x1)
        ys1.append(y1)
    if not xs0:
        return None
    return min(xs0), min(ys0), max(xs1), max(ys1)


def _ring_path(ring) -> str:
    # y is negated so north stays up in SVG's downward y axis
    pts = [f"{_num(float(x))},{_num(-float(y))}" for x, y in ring[:-1]]
    return "M" + " L".join(pts) + " Z"


def render_svg(
    circles: Sequence[Circle],
    regions: Sequence[Region] | None = None,
    style: SvgStyle | None = None,
) -> str:
    """One labelled circle per region, optional outline layer, 5% margin."""
    style = style or SvgStyle()
    regions = sorted(regions or [], key=lambda r: r.id) if style.ghost else []
    circles = sorted(circles, key=lambda c: str(c.region_id))
    ext = _extent(circles, regions)
    if ext is None:
        x0, y0, w, h = 0.0, 0.0, 1.0, 1.0
    else:
        w = max(ext[2] - ext[0], 1e-12)
        h = max(ext[3] - ext[1], 1e-12)
        pad = MARGIN * max(w, h)
        x0, y0 = ext[0] - pad, -ext[3] - pad
        w, h = w + 2 * pad, h + 2 * pad
    height_px = style.width_px * h / w
    unit = w / style.width_px  # map units per pixel

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(style.width_px)}" '
        f'height="{_num(height_px)}" viewBox="{_num(x0)} {_num(y0)} {_num(w)} {_num(h)}">',
    ]
    if regions:
        out.append(f'<g id="regions" fill="none" stroke={quoteattr(style.ghost_stroke)} '
                   f'stroke-width="{_num(0.5 * unit)}">')
        for r in regions:
            d = " ".join(_ring_path(ring) for poly in r.geometry for ring in poly)
            out.append(f'<path id={quoteattr("region-" + r.id)} fill-rule="evenodd" d="{d}"/>')
        out.append("</g>")
    out.append(f'<g id="circles" fill={quoteattr(style.fill)} fill-opacity="0.85" '
               f'stroke={quoteattr(style.stroke)} stroke-width="{_num(unit)}">')
    for c in circles:
        out.append(f'<circle id={quoteattr("circle-" + str(c.region_id))} cx="{_num(c.center[0])}" '
                   f'cy="{_num(-c.center[1])}" r="{_num(c.radius)}"/>')
    out.append("</g>")
    if style.labels and circles:
        out.append(f'<g id="labels" font-family="sans-serif" font-size="{_num(style.font_px * unit)}" '
                   'text-anchor="middle" dominant-baseline="central">')
        for c in circles:
            out.append(f'<text x="{_num(c.center[0])}" y="{_num(-c.center[1])}">{escape(str(c.region_id))}</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def export_features(circles: Sequence[Circle], values: Mapping[str, float] | None = None) -> dict:
    """Point features carrying region_id, value, radius_map_units, dx and dy."""
    values = values or {}
    feats = []
    for c in sorted(circles, key=lambda c: str(c.region_id)):
        value = values.get(c.region_id, math.nan)
        feats.append({
            "type": "Feature",
            "id": c.region_id,
            "geometry": {"type": "Point", "coordinates": [c.center[0], c.center[1]]},
            "properties": {
                "region_id": c.region_id,
                "value": None if math.isnan(value) else value,
                "radius_map_units": c.radius,
                "dx": c.center[0] - c.original_center[0],
                "dy": c.center[1] - c.original_center[1],
            },
        })
    return {"type": "FeatureCollection", "features": feats}


def dumps_features(doc: dict) -> str:
    # repr-exact floats so a parse recovers centres and radii bit for bit
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"
