"""Geometric and geographic track properties.

2D/3D lengths, elevation statistics, circularity, and country assignment by
point-in-polygon tests against a boundaries file.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .gpx_model import Track

# Mean Earth radius, meters.  Pinned so that one degree of arc is
# 111,194.93 m, the value the geodesic checks are frozen against.
EARTH_RADIUS_M = 6_371_000.0


def haversine_m(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance in meters between two points given in degrees."""
    phi1 = math.radians(lat1)
    phi2 = math.radians(lat2)
    dphi = math.radians(lat2 - lat1)
    dlam = math.radians(lon2 - lon1)

    a = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(a)))


def length_2d(track: Track) -> float:
    """Sum of great-circle distances between consecutive points.

    Pairs never span segment boundaries: segments represent recording pauses
    and bridging them would inflate the length.
    """
    total = 0.0
    for segment in track.segments:
        pts = segment.points
        for a, b in zip(pts, pts[1:]):
            total += haversine_m(a.lat, a.lon, b.lat, b.lon)
    return total


def length_3d(track: Track) -> float:
    """Like length_2d but each leg accounts for the elevation change.

    Legs where either endpoint lacks elevation contribute their 2D distance.
    """
    total = 0.0
    for segment in track.segments:
        pts = segment.points
        for a, b in zip(pts, pts[1:]):
            flat = haversine_m(a.lat, a.lon, b.lat, b.lon)
            if a.ele is not None and b.ele is not None:
                total += math.hypot(flat, b.ele - a.ele)
            else:
                total += flat
    return total


@dataclass
class ElevationStats:
    highest: float
    lowest: float
    uphill: float
    downhill: float


def elevation_stats(track: Track, deadband_m: float = 0.0) -> ElevationStats:
    """Highest/lowest elevation and cumulative gain/loss in meters.

    With a non-zero deadband, consecutive changes accumulate against an
    anchor elevation and only count once they exceed the deadband, which
    suppresses sensor jitter.  The default deadband of 0 gives the raw sums
    of positive and negative deltas.  The anchor resets at each segment
    boundary.  Every point must carry an elevation (run the DEM backfill
    first).
    """
    elevations = [p.ele for p in track.iter_points()]
    if not elevations:
        raise ValueError("track has no points")
    if any(e is None for e in elevations):
        raise ValueError("every point needs an elevation before computing stats")

    uphill = 0.0
    downhill = 0.0
    for segment in track.segments:
        pts = segment.points
        if not pts:
            continue
        anchor = pts[0].ele
        for point in pts[1:]:
            delta = point.ele - anchor
            if abs(delta) > deadband_m:
                if delta > 0:
                    uphill += delta
                else:
                    downhill -= delta
                anchor = point.ele

    return ElevationStats(highest=max(elevations), lowest=min(elevations),
                          uphill=uphill, downhill=downhill)


def is_circular(track: Track, radius_m: float = 350.0) -> bool:
    """True when the first and last points lie within radius_m (inclusive).

    The endpoints span segments: first point of the first non-empty segment,
    last point of the last non-empty segment.
    """
    populated = [s for s in track.segments if s.points]
    if not populated:
        raise ValueError("track has no points")
    start = populated[0].points[0]
    end = populated[-1].points[-1]
    return haversine_m(start.lat, start.lon, end.lat, end.lon) <= radius_m


@dataclass
class TrackMetrics:
    length_2d: float
    length_3d: float
    elev_highest: float
    elev_lowest: float
    uphill: float
    downhill: float
    is_circular: bool


def compute_track_metrics(track: Track, circular_radius_m: float = 350.0,
                          deadband_m: float = 0.0) -> TrackMetrics:
    """All geometric properties of a fully backfilled track in one pass."""
    stats = elevation_stats(track, deadband_m=deadband_m)
    return TrackMetrics(
        length_2d=length_2d(track),
        length_3d=length_3d(track),
        elev_highest=stats.highest,
        elev_lowest=stats.lowest,
        uphill=stats.uphill,
        downhill=stats.downhill,
        is_circular=is_circular(track, radius_m=circular_radius_m),
    )


# --- country assignment -----------------------------------------------------

Ring = list[tuple[float, float]]  # closed ring of (lon, lat) vertices


class BoundaryFileError(Exception):
    """Boundaries file is malformed (bad JSON, missing names, unclosed rings)."""


@dataclass
class CountryShape:
    name: str
    # MultiPolygon structure: polygons -> rings (outer first, then holes)
    polygons: list[list[Ring]]
    bbox: tuple[float, float, float, float]  # (min_lon, min_lat, max_lon, max_lat)


def _on_segment(px: float, py: float, x1: float, y1: float, x2: float, y2: float) -> bool:
    cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
    if cross != 0.0:
        return False
    return min(x1, x2) <= px <= max(x1, x2) and min(y1, y2) <= py <= max(y1, y2)


def point_in_polygon(lon: float, lat: float, rings: list[Ring]) -> bool:
    """Even-odd ray-casting test over a polygon's rings, holes included.

    Rings are closed sequences of (lon, lat) vertices.  A point exactly on
    any ring edge counts as inside (consistent tie-break for border points).
    """
    inside = False
    for ring in rings:
        for i in range(len(ring) - 1):
            x1, y1 = ring[i]
            x2, y2 = ring[i + 1]
            if _on_segment(lon, lat, x1, y1, x2, y2):
                return True
            if (y1 > lat) != (y2 > lat):
                x_cross = (x2 - x1) * (lat - y1) / (y2 - y1) + x1
                if lon < x_cross:
                    inside = not inside
    return inside


def load_boundaries(path: str | Path) -> list[CountryShape]:
    """Load named country polygons from a GeoJSON FeatureCollection.

    Each feature needs a "shapeName" or "name" property and a Polygon or
    MultiPolygon geometry whose rings are closed (first vertex equals last).
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise BoundaryFileError(f"cannot read boundaries file {path}: {exc}") from exc

    shapes: list[CountryShape] = []
    for feature in data.get("features", []):
        properties = feature.get("properties") or {}
        name = properties.get("shapeName") or properties.get("name")
        if not name:
            raise BoundaryFileError("feature without shapeName/name property")

        geometry = feature.get("geometry") or {}
        gtype = geometry.get("type")
        coords = geometry.get("coordinates")
        if gtype == "Polygon":
            raw_polygons = [coords]
        elif gtype == "MultiPolygon":
            raw_polygons = coords
        else:
            raise BoundaryFileError(f"{name}: unsupported geometry type {gtype!r}")

        polygons: list[list[Ring]] = []
        for raw_rings in raw_polygons:
            rings: list[Ring] = []
            for raw_ring in raw_rings:
                ring: Ring = [(float(v[0]), float(v[1])) for v in raw_ring]
                if len(ring) < 4 or ring[0] != ring[-1]:
                    raise BoundaryFileError(f"{name}: unclosed ring")
                rings.append(ring)
            polygons.append(rings)

        vertices = [v for polygon in polygons for ring in polygon for v in ring]
        bbox = (min(v[0] for v in vertices), min(v[1] for v in vertices),
                max(v[0] for v in vertices), max(v[1] for v in vertices))
        shapes.append(CountryShape(name=str(name), polygons=polygons, bbox=bbox))
    return shapes


def find_countries(lon: float, lat: float, boundaries: list[CountryShape]) -> list[str]:
    """Names of all shapes containing the point, in file order."""
    matches = []
    for shape in boundaries:
        min_lon, min_lat, max_lon, max_lat = shape.bbox
        if not (min_lon <= lon <= max_lon and min_lat <= lat <= max_lat):
            continue
        if any(point_in_polygon(lon, lat, rings) for rings in shape.polygons):
            matches.append(shape.name)
    return matches


def assign_country(track: Track, boundaries: list[CountryShape]) -> str:
    """Country of the track's first point; "Unknown" when nothing matches.

    Border points falling inside several shapes resolve to the first shape
    in file order.
    """
    populated = [s for s in track.segments if s.points]
    if not populated:
        raise ValueError("track has no points")
    first = populated[0].points[0]
    matches = find_countries(first.lon, first.lat, boundaries)
    return matches[0] if matches else "Unknown"
