"""Builders for synthetic crawl data: GPX documents, WARC files, index shards,
DEM tiles and boundary files.

Everything here is deterministic (gzip members are written with mtime=0), so
demos and tests can rebuild the same fixture crawl byte for byte.
"""

from __future__ import annotations

import gzip
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .elevation import write_hgt
from .geo_metrics import EARTH_RADIUS_M

METERS_PER_DEG_LAT = EARTH_RADIUS_M * math.pi / 180.0


def lat_step(meters: float) -> float:
    """Degrees of latitude spanning the given ground distance."""
    return meters / METERS_PER_DEG_LAT


def lon_step(meters: float, lat: float) -> float:
    """Degrees of longitude spanning the given ground distance at a latitude."""
    return meters / (METERS_PER_DEG_LAT * math.cos(math.radians(lat)))


# --- GPX ----------------------------------------------------------------------

def gpx_xml(tracks: list[dict], metadata_desc: str | None = None,
            version: str = "1.1", namespace: bool = True) -> bytes:
    """Serialize tracks to GPX bytes.

    Each track dict may carry name, desc and segments, where segments is a
    list of point lists and each point is (lat, lon[, ele[, time]]) with None
    for absent values.
    """
    ns = f' xmlns="http://www.topografix.com/GPX/1/{version[-1]}"' if namespace else ""
    out = [f'<?xml version="1.0" encoding="UTF-8"?>\n<gpx version="{version}"{ns} creator="synthetic">']
    if metadata_desc is not None:
        out.append(f"<metadata><desc>{escape(metadata_desc)}</desc></metadata>")
    for track in tracks:
        out.append("<trk>")
        if track.get("name") is not None:
            out.append(f"<name>{escape(track['name'])}</name>")
        if track.get("desc") is not None:
            out.append(f"<desc>{escape(track['desc'])}</desc>")
        for segment in track.get("segments", []):
            out.append("<trkseg>")
            for point in segment:
                lat, lon = point[0], point[1]
                ele = point[2] if len(point) > 2 else None
                time = point[3] if len(point) > 3 else None
                body = ""
                if ele is not None:
                    body += f"<ele>{ele}</ele>"
                if time is not None:
                    body += f"<time>{time}</time>"
                out.append(f'<trkpt lat="{lat}" lon="{lon}">{body}</trkpt>')
            out.append("</trkseg>")
        out.append("</trk>")
    out.append("</gpx>")
    return "\n".join(out).encode("utf-8")


def line_points(start_lat: float, start_lon: float, count: int, spacing_m: float,
                bearing: str = "east", ele=None, times: bool = False) -> list[tuple]:
    """Points in a straight line with fixed ground spacing.

    ``ele`` may be None, a constant, or a callable of the point index.
    """
    points = []
    for i in range(count):
        if bearing == "east":
            lat = start_lat
            lon = start_lon + i * lon_step(spacing_m, start_lat)
        else:
            lat = start_lat + i * lat_step(spacing_m)
            lon = start_lon
        elevation = ele(i) if callable(ele) else ele
        time = f"2024-03-01T09:{i // 60:02d}:{i % 60:02d}Z" if times else None
        points.append((lat, lon, elevation, time))
    return points


def loop_points(start_lat: float, start_lon: float, side_m: float,
                spacing_m: float, ele=None) -> list[tuple]:
    """A closed square loop: north, east, south, then west back to the start."""
    steps = int(side_m / spacing_m)
    points = [(start_lat, start_lon)]
    lat, lon = start_lat, start_lon
    for dlat, dlon in ((lat_step(spacing_m), 0.0), (0.0, lon_step(spacing_m, start_lat)),
                       (-lat_step(spacing_m), 0.0), (0.0, -lon_step(spacing_m, start_lat))):
        for _ in range(steps):
            lat += dlat
            lon += dlon
            points.append((lat, lon))
    points[-1] = (start_lat, start_lon)  # exact closure
    elevation = (lambda i: ele) if ele is not None and not callable(ele) else ele
    return [(p[0], p[1], elevation(i) if elevation else None, None)
            for i, p in enumerate(points)]


# --- WARC / index --------------------------------------------------------------

def warc_response_member(url: str, payload: bytes, http_status: str = "200 OK",
                         warc_type: str = "response",
                         content_type: str = "application/gpx+xml") -> bytes:
    """One gzip member holding a WARC record that wraps an HTTP response."""
    http = (f"HTTP/1.1 {http_status}\r\n"
            f"Content-Type: {content_type}\r\n"
            f"Content-Length: {len(payload)}\r\n\r\n").encode("latin-1") + payload
    warc = (f"WARC/1.0\r\n"
            f"WARC-Type: {warc_type}\r\n"
            f"WARC-Target-URI: {url}\r\n"
            f"Content-Type: application/http; msgtype=response\r\n"
            f"Content-Length: {len(http)}\r\n\r\n").encode("latin-1") + http + b"\r\n\r\n"
    buffer = io.BytesIO()
    with gzip.GzipFile(fileobj=buffer, mode="wb", mtime=0) as member:
        member.write(warc)
    return buffer.getvalue()


def write_warc(path: Path, entries: list[tuple[str, bytes]]) -> list[tuple[int, int]]:
    """Concatenate members into a WARC file; return each (offset, length)."""
    path.parent.mkdir(parents=True, exist_ok=True)
    ranges = []
    offset = 0
    with open(path, "wb") as handle:
        for url, member in ((url, warc_response_member(url, payload))
                            for url, payload in entries):
            handle.write(member)
            ranges.append((offset, len(member)))
            offset += len(member)
    return ranges


def cdxj_line(url: str, filename: str, offset: int, length: int,
              mime: str = "application/gpx+xml",
              timestamp: str = "20240210120000") -> str:
    host = url.split("//", 1)[-1].split("/", 1)[0]
    surt = ",".join(reversed(host.split("."))) + ")"
    payload = {"url": url, "mime": mime, "mime-detected": mime, "status": "200",
               "filename": filename, "offset": str(offset), "length": str(length)}
    return f"{surt} {timestamp} {json.dumps(payload)}"


def write_index_shard(path: Path, lines: list[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    data = ("\n".join(lines) + "\n").encode("utf-8")
    if path.suffix == ".gz":
        path.write_bytes(gzip.compress(data, mtime=0))
    else:
        path.write_bytes(data)


# --- DEM / boundaries -----------------------------------------------------------

def constant_tile(srtm_dir: Path, name: str, value: int, n: int = 1201) -> Path:
    srtm_dir.mkdir(parents=True, exist_ok=True)
    path = srtm_dir / f"{name}.hgt"
    write_hgt(path, np.full((n, n), value, dtype=np.int16))
    return path


def box_feature(name: str, min_lon: float, min_lat: float,
                max_lon: float, max_lat: float) -> dict:
    ring = [[min_lon, min_lat], [max_lon, min_lat], [max_lon, max_lat],
            [min_lon, max_lat], [min_lon, min_lat]]
    return {"type": "Feature", "properties": {"shapeName": name},
            "geometry": {"type": "Polygon", "coordinates": [ring]}}


def write_boundaries(path: Path, features: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps({"type": "FeatureCollection", "features": features}),
                    encoding="utf-8")


# --- the bundled demo crawl -----------------------------------------------------

DEMO_WARC = "crawl-data/CC-MAIN-2024-10/segments/1707000000000.0/warc/CC-MAIN-20240210-00000.warc.gz"

DEMO_DESC_EN = ("A gentle walk from the old station along the river, with a short "
                "climb to the viewpoint above the weir. Mostly firm paths, two "
                "stiles, and one muddy stretch after rain.")
DEMO_DESC_DE = ("Eine schöne Rundwanderung durch den Wald mit herrlichem Blick über "
                "das Tal. Der Start liegt am alten Rathaus, von dort folgt man den "
                "gelben Markierungen bis zur Schutzhütte am Gipfel.")
DEMO_DESC_LONG = ("A fine and varied circuit on good tracks through rolling "
                  "farmland, passing the mill pond and the beech woods before "
                  "returning along the ridge with wide views to the coast.")


@dataclass
class DemoCrawl:
    """Everything a pipeline run needs, rooted in one directory."""

    root: Path
    shard: Path = field(init=False)
    warc_dir: Path = field(init=False)
    srtm_dir: Path = field(init=False)
    boundaries: Path = field(init=False)
    config: Path = field(init=False)
    urls: dict = field(default_factory=dict)


def build_demo_crawl(root: Path) -> DemoCrawl:
    """Materialize the six-document fixture crawl.

    Contents: two exportable tracks (an English linear walk in a "United
    Kingdom" box with device elevation, and a German loop in a "Germany" box
    backfilled from a constant DEM tile), plus one document each tripping the
    multi-track, too-short, low-density and short-description filters.  One
    extra index line points at a non-GPX HTML page.
    """
    crawl = DemoCrawl(root=Path(root))
    root = crawl.root
    warc_path = root / "warc" / DEMO_WARC

    uk_points = line_points(53.80, -2.45, count=41, spacing_m=50.0,
                            ele=lambda i: 80.0 + 0.5 * i, times=True)
    de_points = loop_points(49.352, 6.855, side_m=500.0, spacing_m=50.0)

    documents = [
        ("https://walks.example/routes/riverside.gpx",
         gpx_xml([{"name": "Riverside walk", "desc": DEMO_DESC_EN,
                   "segments": [uk_points]}])),
        ("https://wandern.example/touren/waldrunde.gpx",
         gpx_xml([{"name": "Waldrunde", "desc": DEMO_DESC_DE,
                   "segments": [de_points]}])),
        ("https://race.example/etappen/alpen.gpx",
         gpx_xml([{"name": "Etappe 1", "desc": DEMO_DESC_LONG,
                   "segments": [line_points(47.1, 10.2, 12, 60.0, ele=900.0)]},
                  {"name": "Etappe 2",
                   "segments": [line_points(47.3, 10.5, 12, 60.0, ele=950.0)]}])),
        ("https://walks.example/routes/shortcut.gpx",
         gpx_xml([{"name": "Shortcut", "desc": DEMO_DESC_LONG,
                   "segments": [line_points(53.9, -2.1, 7, 50.0, ele=90.0)]}])),
        ("https://walks.example/routes/sparse.gpx",
         gpx_xml([{"name": "Sparse", "desc": DEMO_DESC_LONG,
                   "segments": [line_points(53.95, -2.2, 2, 2000.0, ele=100.0)]}])),
        ("https://walks.example/routes/terse.gpx",
         gpx_xml([{"name": "Terse", "desc": "Nice walk.",
                   "segments": [line_points(53.85, -2.3, 21, 50.0, ele=85.0)]}])),
    ]
    ranges = write_warc(warc_path, documents)

    lines = [cdxj_line(url, DEMO_WARC, offset, length)
             for (url, _), (offset, length) in zip(documents, ranges)]
    lines.append(cdxj_line("https://walks.example/about.html", DEMO_WARC,
                           0, 1, mime="text/html"))
    crawl.shard = root / "index" / "shard-00000.gz"
    write_index_shard(crawl.shard, lines)

    crawl.warc_dir = root / "warc"
    crawl.srtm_dir = root / "srtm"
    constant_tile(crawl.srtm_dir, "N49E006", 250)

    crawl.boundaries = root / "boundaries.geojson"
    write_boundaries(crawl.boundaries, [
        box_feature("United Kingdom", -3.2, 53.2, -1.8, 54.3),
        box_feature("Germany", 6.0, 49.0, 7.5, 50.2),
    ])

    # The rare-language cutoff is corpus-scale; at six documents it would
    # empty the output, so the demo config disables it.
    crawl.config = root / "config.json"
    crawl.config.write_text(json.dumps({
        "workdir": str(root / "work"),
        "shards": str(crawl.shard),
        "fixture_dir": str(crawl.warc_dir),
        "srtm_dir": str(crawl.srtm_dir),
        "boundaries": str(crawl.boundaries),
        "judge": "stub",
        "translator": "stub",
        "filters": {"rare_lang_cutoff": 0},
        "fetch": {"rate_limit_per_s": 1000.0, "backoff_base_s": 0.01,
                  "max_parallel": 4, "base_url": "https://data.example"},
    }, indent=2), encoding="utf-8")

    crawl.urls = {
        "valid_en": documents[0][0],
        "valid_de": documents[1][0],
        "multi_track": documents[2][0],
        "too_short": documents[3][0],
        "low_density": documents[4][0],
        "desc_too_short": documents[5][0],
    }
    return crawl
