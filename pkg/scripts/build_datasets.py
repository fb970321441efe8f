"""Build the two benchmark feature collections shipped in ``data/``.

Dataset A: lower-48 US states plus DC, dissolved from the county shapefile in
the ``basemap-data`` wheel, with 2015 Census Bureau population estimates.
Dissolving, snapping and simplification happen in CONUS Albers (EPSG:5070);
the result is written back in WGS84 longitude/latitude.

Dataset B: North and South American countries from the Natural Earth
``naturalearth_lowres`` layer bundled with ``geopandas<1``, with ``pop_est``,
kept in its native WGS84 longitude/latitude.

Both files therefore use degrees as map units, the coordinate system both
public sources are distributed in.

Needs ``pyshp`` and ``pyproj`` (not runtime dependencies). Run once::

    pip download --no-deps basemap-data==2.0.0 geopandas==0.14.4 -d /tmp/wheels
    python scripts/build_datasets.py /tmp/wheels
"""

from __future__ import annotations

import io
import json
import sys
import zipfile
from pathlib import Path

import pyproj
import shapefile
import shapely
from shapely.geometry import mapping, shape
from shapely.ops import transform

OUT = Path(__file__).resolve().parent.parent / "data"

# Vintage 2015 annual estimates of the resident population, July 1 2015.
POP2015 = {
    "AL": 4858979, "AZ": 6828065, "AR": 2978204, "CA": 39144818,
    "CO": 5456574, "CT": 3590886, "DE": 945934, "DC": 672228,
    "FL": 20271272, "GA": 10214860, "ID": 1654930, "IL": 12859995,
    "IN": 6619680, "IA": 3123899, "KS": 2911641, "KY": 4425092,
    "LA": 4670724, "ME": 1329328, "MD": 6006401, "MA": 6794422,
    "MI": 9922576, "MN": 5489594, "MS": 2992333, "MO": 6083672,
    "MT": 1032949, "NE": 1896190, "NV": 2890845, "NH": 1330608,
    "NJ": 8958013, "NM": 2085109, "NY": 19795791, "NC": 10042802,
    "ND": 756927, "OH": 11613423, "OK": 3911338, "OR": 4028977,
    "PA": 12802503, "RI": 1056298, "SC": 4896146, "SD": 858469,
    "TN": 6600299, "TX": 27469114, "UT": 2995919, "VT": 626042,
    "VA": 8382993, "WA": 7170351, "WV": 1844128, "WI": 5771337,
    "WY": 586107,
}


def _reader(wheel: Path, stem: str) -> shapefile.Reader:
    z = zipfile.ZipFile(wheel)
    parts = {ext: io.BytesIO(z.read(f"{stem}.{ext}")) for ext in ("shp", "shx", "dbf")}
    return shapefile.Reader(shp=parts["shp"], shx=parts["shx"], dbf=parts["dbf"], encoding="latin-1")


def _round(geom, ndigits):
    return shapely.set_precision(geom, 10.0 ** -ndigits)


def _write(path: Path, features: list[dict]) -> None:
    doc = {"type": "FeatureCollection", "features": features}
    path.write_text(json.dumps(doc, separators=(",", ":")) + "\n")
    print(f"wrote {path} ({len(features)} features)")


def build_us(wheel: Path) -> None:
    r = _reader(wheel, "mpl_toolkits/basemap_data/UScounties")
    to_albers = pyproj.Transformer.from_crs("EPSG:4326", "EPSG:5070", always_xy=True).transform
    to_lonlat = pyproj.Transformer.from_crs("EPSG:5070", "EPSG:4326", always_xy=True).transform
    by_state: dict[str, list] = {}
    for sr in r.iterShapeRecords():
        st = sr.record["STATE"]
        if st not in POP2015:
            continue
        by_state.setdefault(st, []).append(shape(sr.shape.__geo_interface__).buffer(0))
    codes = sorted(by_state)
    # Snap to a 100 m grid so county-derived state outlines share exact vertices.
    dissolved = [
        _round(transform(to_albers, shapely.union_all(by_state[c])), -2) for c in codes
    ]
    simplified = shapely.coverage_simplify(dissolved, 5000.0)
    feats = []
    for code, geom in zip(codes, simplified):
        # Shared vertices map to identical degrees, so borders stay exact.
        geom = shapely.make_valid(_round(transform(to_lonlat, geom), 6))
        feats.append({
            "type": "Feature",
            "id": code,
            "properties": {"STATE": code, "POP2015": POP2015[code]},
            "geometry": mapping(geom),
        })
    _write(OUT / "us48_pop2015.geojson", feats)


def build_americas(wheel: Path) -> None:
    r = _reader(wheel, "geopandas/datasets/naturalearth_lowres/naturalearth_lowres")
    feats = []
    for sr in r.iterShapeRecords():
        rec = sr.record
        if rec["continent"] not in ("North America", "South America"):
            continue
        geom = _round(shape(sr.shape.__geo_interface__), 6)
        code = rec["iso_a3"] if rec["iso_a3"] != "-99" else rec["name"][:3].upper()
        feats.append({
            "type": "Feature",
            "id": code,
            "properties": {"ISO_A3": code, "NAME": rec["name"], "POP_EST": int(rec["pop_est"])},
            "geometry": mapping(shapely.make_valid(geom)),
        })
    feats.sort(key=lambda f: f["id"])
    _write(OUT / "americas_pop.geojson", feats)


if __name__ == "__main__":
    wheels = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
    OUT.mkdir(exist_ok=True)
    build_us(next(wheels.glob("basemap_data-*.whl")))
    build_americas(next(wheels.glob("geopandas-*.whl")))
