"""Output records: track filters, deduplication, assembly, and export.

Every exported record carries the same 17 properties; geometry is a
MultiLineString whose vertices are [lon, lat, elevation] triples, one line
string per original segment.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .config import FilterConfig
from .descriptions import CleanDescription
from .geo_metrics import TrackMetrics
from .gpx_model import Track
from .index_scan import CandidateRecord

SCALAR_PROPERTIES = (
    "url", "warc_file", "warc_offset", "warc_len", "country",
    "desc", "desc_lang", "desc_en", "elev_source",
    "elev_highest", "elev_lowest", "uphill", "downhill",
    "length_2d", "length_3d", "is_circular",
)
ALL_PROPERTIES = SCALAR_PROPERTIES + ("geometry",)

_ROUNDED_PROPERTIES = ("elev_highest", "elev_lowest", "uphill", "downhill",
                       "length_2d", "length_3d")


class RecordAssemblyError(Exception):
    """A pipeline stage handed assembly an incomplete component (a bug)."""


@dataclass
class OutputRecord:
    url: str
    warc_file: str
    warc_offset: int
    warc_len: int
    country: str
    desc: str
    desc_lang: str
    desc_en: str
    elev_source: str
    elev_highest: float
    elev_lowest: float
    uphill: float
    downhill: float
    length_2d: float
    length_3d: float
    is_circular: bool
    geometry: list[list[list[float]]]  # segments -> [lon, lat, elevation]


def passes_track_filters(track: Track, length_2d_m: float,
                         config: FilterConfig) -> tuple[bool, str | None]:
    """Apply the geometry filters; on failure, name the first broken rule.

    Length bounds are inclusive at both ends; density is the total point
    count per 100 m of 2D length, also inclusive at the threshold.
    """
    if length_2d_m < config.min_length_m:
        return False, "too-short"
    if length_2d_m > config.max_length_m:
        return False, "too-long"
    density = track.point_count() / (length_2d_m / 100.0)
    if density < config.min_points_per_100m:
        return False, "low-density"
    return True, None


def assemble_record(candidate: CandidateRecord, track: Track, metrics: TrackMetrics,
                    desc: CleanDescription, country: str, elev_source: str) -> OutputRecord:
    """Combine all stage outputs into one output record.

    A missing component means a stage was skipped; that is a programming
    error, reported by field name.
    """
    for field_name, value in (("candidate", candidate), ("track", track),
                              ("metrics", metrics), ("desc", desc),
                              ("country", country), ("elev_source", elev_source)):
        if not value:
            raise RecordAssemblyError(f"missing component: {field_name}")

    geometry = []
    for segment in track.segments:
        line = []
        for point in segment.points:
            if point.ele is None:
                raise RecordAssemblyError(f"point without elevation in {candidate.url}")
            line.append([point.lon, point.lat, point.ele])
        geometry.append(line)

    return OutputRecord(
        url=candidate.url,
        warc_file=candidate.warc_file,
        warc_offset=candidate.warc_offset,
        warc_len=candidate.warc_len,
        country=country,
        desc=desc.text,
        desc_lang=desc.lang,
        desc_en=desc.text_en,
        elev_source=elev_source,
        elev_highest=metrics.elev_highest,
        elev_lowest=metrics.elev_lowest,
        uphill=metrics.uphill,
        downhill=metrics.downhill,
        length_2d=metrics.length_2d,
        length_3d=metrics.length_3d,
        is_circular=metrics.is_circular,
        geometry=geometry,
    )


def dedup(rows: Iterable[dict], url_key: str = "url", crawl_key: str = "crawl_id",
          hash_key: str = "content_hash", counts: dict | None = None) -> list[dict]:
    """Keep one row per URL, then one per content hash.

    Rows are processed in ascending (url, crawl_id) order and the first
    occurrence survives, so the outcome never depends on input order.  Pass a
    dict as ``counts`` to receive the per-pass removal tallies.
    """
    ordered = sorted(rows, key=lambda r: (r[url_key], r.get(crawl_key, "")))
    survivors = []
    seen_urls = set()
    for row in ordered:
        if row[url_key] in seen_urls:
            continue
        seen_urls.add(row[url_key])
        survivors.append(row)

    deduped = []
    seen_hashes = set()
    for row in survivors:
        digest = row[hash_key]
        if digest in seen_hashes:
            continue
        seen_hashes.add(digest)
        deduped.append(row)

    if counts is not None:
        counts["duplicate-url"] = len(ordered) - len(survivors)
        counts["duplicate-content"] = len(survivors) - len(deduped)
    return deduped


def record_properties(record: OutputRecord | dict) -> dict:
    """The 16 scalar properties, with metric values rounded to 2 decimals.

    Centimeter precision already exceeds GPS accuracy, and fixed rounding
    keeps re-exports byte-identical.
    """
    raw = record if isinstance(record, dict) else record.__dict__
    properties = {}
    for name in SCALAR_PROPERTIES:
        value = raw[name]
        if name in _ROUNDED_PROPERTIES:
            value = round(float(value), 2)
        properties[name] = value
    return properties


def to_feature(record: OutputRecord | dict) -> dict:
    raw = record if isinstance(record, dict) else record.__dict__
    return {
        "type": "Feature",
        "properties": record_properties(record),
        "geometry": {"type": "MultiLineString", "coordinates": raw["geometry"]},
    }


def to_json_obj(record: OutputRecord | dict) -> dict:
    raw = record if isinstance(record, dict) else record.__dict__
    obj = record_properties(record)
    obj["geometry"] = {"type": "MultiLineString", "coordinates": raw["geometry"]}
    return obj


def export_records(records: Iterable[OutputRecord | dict], out_dir: str | Path) -> dict[str, Path]:
    """Write the dataset as GeoJSON, line-delimited JSON, and scalar CSV.

    Output order follows the input (dedup survivor order); identical inputs
    produce byte-identical files.
    """
    records = list(records)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    paths = {
        "geojson": out_dir / "tracks.geojson",
        "jsonl": out_dir / "tracks.jsonl",
        "csv": out_dir / "tracks.csv",
    }

    collection = {"type": "FeatureCollection",
                  "features": [to_feature(r) for r in records]}
    paths["geojson"].write_text(json.dumps(collection, ensure_ascii=False),
                                encoding="utf-8")

    with open(paths["jsonl"], "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(to_json_obj(record), ensure_ascii=False))
            handle.write("\n")

    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(SCALAR_PROPERTIES), lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow(record_properties(record))
    paths["csv"].write_text(buffer.getvalue(), encoding="utf-8")

    return paths
