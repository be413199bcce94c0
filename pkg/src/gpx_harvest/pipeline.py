"""Staged, resumable pipeline: index -> fetch -> parse -> enrich -> metrics -> export.

Each stage reads its predecessor's files under the work directory, writes its
own output plus a manifest, and reports a funnel line (inputs = outputs +
exclusions).  A completed stage whose manifest and outputs are intact is
skipped on re-runs, so deleting one stage's output re-executes only that
stage.
"""

from __future__ import annotations

import glob
import hashlib
import json
import logging
import os
import tempfile
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import judges
from .config import PipelineConfig
from .descriptions import (CleanDescription, PiiFlags, clean_text, filter_rare_languages,
                           mask_pii)
from .elevation import ElevationUnavailableError, TileStore, backfill_elevation
from .geo_metrics import compute_track_metrics, find_countries, length_2d, load_boundaries
from .gpx_model import (GpxParseError, ParseStats, Segment, Track, TrackPoint,
                        extract_single_track, parse_gpx, strip_timestamps)
from .index_scan import CandidateRecord, ScanStats, iter_shard_lines, scan_index
from .records import assemble_record, dedup, export_records, passes_track_filters
from .warc_fetch import (FetchFailedError, FixtureTransport, HttpRangeTransport,
                         PayloadDecodeError, WarcRecordSkippedError, extract_payload,
                         fetch_many)

logger = logging.getLogger(__name__)

STAGES = ("index", "fetch", "parse", "enrich", "metrics", "export")

# Operational problems, as opposed to data-quality exclusions; any of these
# turns the run's exit status into "completed with failures".
FAILURE_REASONS = ("fetch-failed", "judge-unavailable", "translation-failed")


class PipelineError(Exception):
    """A stage cannot run at all (missing inputs, bad configuration)."""


@dataclass
class StageReport:
    stage: str
    inputs: int = 0
    outputs: int = 0
    excluded: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    def exclude(self, reason: str, count: int = 1) -> None:
        self.excluded[reason] = self.excluded.get(reason, 0) + count

    def failures(self) -> int:
        return sum(self.excluded.get(reason, 0) for reason in FAILURE_REASONS)

    def to_dict(self) -> dict:
        return {"stage": self.stage, "inputs": self.inputs, "outputs": self.outputs,
                "excluded": dict(sorted(self.excluded.items())),
                "info": dict(sorted(self.info.items()))}

    @classmethod
    def from_dict(cls, raw: dict) -> "StageReport":
        return cls(stage=raw["stage"], inputs=raw["inputs"], outputs=raw["outputs"],
                   excluded=dict(raw.get("excluded", {})), info=dict(raw.get("info", {})))


@dataclass
class PipelinePaths:
    """Stage input/output locations; anything not set lands under workdir."""

    workdir: Path
    candidates: Path | None = None
    raw_dir: Path | None = None
    fetched: Path | None = None
    fetch_failures: Path | None = None
    parsed: Path | None = None
    enriched: Path | None = None
    final: Path | None = None

    def __post_init__(self) -> None:
        self.workdir = Path(self.workdir)
        defaults = {
            "candidates": self.workdir / "candidates.jsonl",
            "raw_dir": self.workdir / "raw",
            "fetched": self.workdir / "fetched.jsonl",
            "fetch_failures": self.workdir / "fetch_failures.jsonl",
            "parsed": self.workdir / "parsed.jsonl",
            "enriched": self.workdir / "enriched.jsonl",
            "final": self.workdir / "final.jsonl",
        }
        for name, default in defaults.items():
            if getattr(self, name) is None:
                setattr(self, name, default)

    def manifest(self, stage: str) -> Path:
        return self.workdir / "manifests" / f"{stage}.json"


def write_json_atomic(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            json.dump(obj, handle, ensure_ascii=False, indent=2)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_jsonl(path: Path, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, ensure_ascii=False))
            handle.write("\n")


def read_jsonl(path: Path, stage: str) -> list[dict]:
    if not path.exists():
        raise PipelineError(f"stage {stage}: missing input {path}")
    with open(path, "r", encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]


def _finish_stage(paths: PipelinePaths, report: StageReport, outputs: list[Path]) -> StageReport:
    write_json_atomic(paths.manifest(report.stage), {
        "stage": report.stage,
        "outputs": [str(p) for p in outputs],
        "report": report.to_dict(),
    })
    return report


# --- stages ---------------------------------------------------------------------

def stage_index(cfg: PipelineConfig, paths: PipelinePaths) -> StageReport:
    if not cfg.shards:
        raise PipelineError("stage index: no --shards glob configured")
    shard_paths = sorted(glob.glob(cfg.shards))
    if not shard_paths:
        raise PipelineError(f"stage index: no shards match {cfg.shards!r}")

    report = StageReport("index")
    stats = ScanStats()
    rows = []
    for shard in shard_paths:
        try:
            for record in scan_index(iter_shard_lines(shard), stats):
                rows.append(record.__dict__)
        except OSError as exc:
            raise PipelineError(f"stage index: cannot read shard {shard}: {exc}") from exc

    write_jsonl(paths.candidates, rows)
    report.inputs = stats.lines
    report.outputs = stats.candidates
    report.excluded = {}
    report.info = {"shards": len(shard_paths), "not_candidate": stats.not_candidate,
                   "malformed": stats.malformed, "blank": stats.blank}
    logger.info("index: %d lines -> %d candidates (%d malformed)",
                stats.lines, stats.candidates, stats.malformed)
    return _finish_stage(paths, report, [paths.candidates])


def stage_fetch(cfg: PipelineConfig, paths: PipelinePaths) -> StageReport:
    rows = read_jsonl(paths.candidates, "fetch")
    candidates = [CandidateRecord(**row) for row in rows]
    transport = (FixtureTransport(cfg.fixture_dir) if cfg.fixture_dir
                 else HttpRangeTransport())

    report = StageReport("fetch")
    report.inputs = len(candidates)
    paths.raw_dir.mkdir(parents=True, exist_ok=True)

    fetched_rows = []
    failure_rows = []
    for candidate, result in fetch_many(candidates, cfg.fetch, transport):
        if isinstance(result, FetchFailedError):
            report.exclude("fetch-failed")
            failure_rows.append({"url": candidate.url, "reason": str(result)})
            continue
        try:
            payload = extract_payload(result)
        except WarcRecordSkippedError as exc:
            report.exclude("skipped-record")
            failure_rows.append({"url": candidate.url, "reason": str(exc)})
            continue
        except PayloadDecodeError as exc:
            report.exclude("decode-error")
            failure_rows.append({"url": candidate.url, "reason": str(exc)})
            continue
        digest = hashlib.sha256(payload).hexdigest()
        payload_path = paths.raw_dir / f"{digest}.gpx"
        payload_path.write_bytes(payload)
        fetched_rows.append({**candidate.__dict__, "content_hash": digest,
                             "payload": str(payload_path)})

    write_jsonl(paths.fetched, fetched_rows)
    write_jsonl(paths.fetch_failures, failure_rows)
    report.outputs = len(fetched_rows)
    logger.info("fetch: %d candidates -> %d payloads (%d failed)",
                len(candidates), len(fetched_rows), len(failure_rows))
    return _finish_stage(paths, report, [paths.fetched, paths.fetch_failures])


def _track_to_segments(track: Track) -> list[list[list]]:
    return [[[p.lat, p.lon, p.ele] for p in segment.points] for segment in track.segments]


def _segments_to_track(name, desc, segments) -> Track:
    return Track(name=name, desc=desc,
                 segments=[Segment(points=[TrackPoint(lat=p[0], lon=p[1], ele=p[2])
                                           for p in seg]) for seg in segments])


def stage_parse(cfg: PipelineConfig, paths: PipelinePaths) -> StageReport:
    rows = read_jsonl(paths.fetched, "parse")
    report = StageReport("parse")
    report.inputs = len(rows)

    parse_stats = ParseStats()
    parsed_rows = []
    for row in rows:
        payload_path = Path(row.get("payload") or paths.raw_dir / f"{row['content_hash']}.gpx")
        if not payload_path.exists():
            raise PipelineError(f"stage parse: missing payload {payload_path}")
        try:
            doc = parse_gpx(payload_path.read_bytes(), row["url"], parse_stats)
        except GpxParseError:
            report.exclude("parse-error")
            continue

        track = extract_single_track(doc)
        if track is None:
            populated = sum(1 for t in doc.tracks if t.point_count() > 0)
            report.exclude("multi-track" if populated > 1 else "no-track")
            continue

        track = strip_timestamps(track)
        flat_length = length_2d(track)
        ok, reason = passes_track_filters(track, flat_length, cfg.filters)
        if not ok:
            report.exclude(reason)
            continue

        parsed_rows.append({**row, "name": track.name, "desc": track.desc,
                            "length_2d": flat_length,
                            "segments": _track_to_segments(track)})

    write_jsonl(paths.parsed, parsed_rows)
    report.outputs = len(parsed_rows)
    report.info = {"points_dropped": parse_stats.points_dropped,
                   "tracks_dropped": parse_stats.tracks_dropped}
    logger.info("parse: %d payloads -> %d single-track activities", len(rows), len(parsed_rows))
    return _finish_stage(paths, report, [paths.parsed])


def _build_judge(cfg: PipelineConfig):
    if cfg.judge == "stub":
        return judges.StubJudge()
    return judges.ChatEndpointJudge(cfg.judge, model=cfg.judge_model,
                                    api_key=os.environ.get(cfg.judge_api_key_env))


def _build_translator(cfg: PipelineConfig):
    if cfg.translator == "stub":
        return judges.StubTranslator()
    return judges.CommandTranslator(cfg.translator)


def stage_enrich(cfg: PipelineConfig, paths: PipelinePaths) -> StageReport:
    from .language import detect_language

    rows = read_jsonl(paths.parsed, "enrich")
    report = StageReport("enrich")
    report.inputs = len(rows)

    judge = _build_judge(cfg)
    translator = _build_translator(cfg)

    def enrich_one(row: dict):
        text = clean_text(row.get("desc") or "")
        text, pii_flags = mask_pii(text)
        if len(text) < cfg.filters.desc_min_chars:
            return "desc-too-short", None
        if len(text) >= cfg.filters.desc_max_chars_exclusive:
            return "desc-too-long", None
        try:
            if not judges.judge_quality(text, judge):
                return "low-quality", None
            if judges.judge_pii(text, judge):
                return "pii", None
        except judges.JudgeUnavailableError:
            return "judge-unavailable", None
        lang = detect_language(text)
        if lang == "unknown":
            return "unknown-lang", None
        try:
            text_en = judges.translate_to_english(text, lang, translator)
        except judges.TranslationFailedError:
            return "translation-failed", None
        return None, {**row, "desc": text, "desc_lang": lang, "desc_en": text_en,
                      "pii_flags": pii_flags.__dict__}

    with ThreadPoolExecutor(max_workers=max(1, cfg.judge_max_parallel)) as pool:
        results = list(pool.map(enrich_one, rows))

    kept = []
    for reason, row in results:
        if reason is not None:
            report.exclude(reason)
        else:
            kept.append(row)

    survivors = filter_rare_languages(kept, get_lang=lambda r: r["desc_lang"],
                                      cutoff=cfg.filters.rare_lang_cutoff)
    rare = len(kept) - len(survivors)
    if rare:
        report.exclude("rare-lang", rare)

    write_jsonl(paths.enriched, survivors)
    report.outputs = len(survivors)
    report.info = {"languages": dict(sorted(Counter(r["desc_lang"] for r in survivors).items()))}
    logger.info("enrich: %d tracks -> %d with usable descriptions", len(rows), len(survivors))
    return _finish_stage(paths, report, [paths.enriched])


def stage_metrics(cfg: PipelineConfig, paths: PipelinePaths) -> StageReport:
    rows = read_jsonl(paths.enriched, "metrics")
    report = StageReport("metrics")
    report.inputs = len(rows)

    tiles = TileStore(cfg.srtm_dir) if cfg.srtm_dir else TileStore(Path(os.devnull))
    boundaries = load_boundaries(cfg.boundaries) if cfg.boundaries else []

    final_rows = []
    info = Counter()
    for row in rows:
        track = _segments_to_track(row.get("name"), row["desc"], row["segments"])
        try:
            track, elev_source = backfill_elevation(track, tiles)
        except ElevationUnavailableError:
            report.exclude("elevation-unavailable")
            continue
        info["elev_gps" if elev_source == "GPS" else "elev_dem"] += 1

        metrics = compute_track_metrics(track,
                                        circular_radius_m=cfg.filters.circular_radius_m,
                                        deadband_m=cfg.filters.elev_deadband_m)

        first = track.segments[0].points[0]
        matches = find_countries(first.lon, first.lat, boundaries)
        country = matches[0] if matches else "Unknown"
        if not matches:
            info["country_unknown"] += 1
        elif len(matches) > 1:
            info["country_ambiguous"] += 1

        candidate = CandidateRecord(url=row["url"], mime_detected=row.get("mime_detected", ""),
                                    warc_file=row["warc_file"], warc_offset=row["warc_offset"],
                                    warc_len=row["warc_len"], crawl_id=row.get("crawl_id", ""))
        desc = CleanDescription(text=row["desc"], lang=row["desc_lang"],
                                text_en=row["desc_en"], pii=PiiFlags(**row["pii_flags"]))
        record = assemble_record(candidate, track, metrics, desc, country, elev_source)
        final_rows.append({"url": row["url"], "crawl_id": row.get("crawl_id", ""),
                           "content_hash": row["content_hash"],
                           "record": record.__dict__})

    write_jsonl(paths.final, final_rows)
    report.outputs = len(final_rows)
    report.info = dict(sorted(info.items()))
    logger.info("metrics: %d tracks -> %d records", len(rows), len(final_rows))
    return _finish_stage(paths, report, [paths.final])


def stage_export(cfg: PipelineConfig, paths: PipelinePaths) -> StageReport:
    rows = read_jsonl(paths.final, "export")
    report = StageReport("export")
    report.inputs = len(rows)

    counts: dict[str, int] = {}
    survivors = dedup(rows, counts=counts)
    for reason, count in counts.items():
        if count:
            report.exclude(reason, count)

    out_dir = cfg.resolved_out_dir()
    try:
        written = export_records([row["record"] for row in survivors], out_dir)
    except OSError as exc:
        raise PipelineError(f"stage export: cannot write to {out_dir}: {exc}") from exc
    report.outputs = len(survivors)

    stats_path = out_dir / "stats.json"
    write_json_atomic(stats_path, _collect_stats(paths, report).to_dict())
    logger.info("export: %d records -> %s", len(survivors), out_dir)
    return _finish_stage(paths, report,
                         [written["geojson"], written["jsonl"], written["csv"], stats_path])


_STAGE_FUNCTIONS = {
    "index": stage_index,
    "fetch": stage_fetch,
    "parse": stage_parse,
    "enrich": stage_enrich,
    "metrics": stage_metrics,
    "export": stage_export,
}


# --- orchestration ----------------------------------------------------------------

@dataclass
class PipelineStats:
    reports: dict[str, StageReport]
    executed: list[str]

    def records(self) -> int:
        return self.reports["export"].outputs if "export" in self.reports else 0

    def failures(self) -> int:
        return sum(report.failures() for report in self.reports.values())

    def exclusions(self) -> dict[str, int]:
        merged: Counter = Counter()
        for report in self.reports.values():
            merged.update(report.excluded)
        return dict(sorted(merged.items()))

    def to_dict(self) -> dict:
        return {"stages": {name: report.to_dict() for name, report in self.reports.items()},
                "exclusions": self.exclusions(),
                "records": self.records(),
                "failures": self.failures()}

    def format_table(self) -> str:
        lines = [f"{'stage':<8} {'in':>7} {'out':>7}  exclusions"]
        for name, report in self.reports.items():
            excluded = ", ".join(f"{reason}={count}"
                                 for reason, count in sorted(report.excluded.items()))
            lines.append(f"{name:<8} {report.inputs:>7} {report.outputs:>7}  {excluded}")
        lines.append(f"records: {self.records()}   failures: {self.failures()}")
        return "\n".join(lines)


def _collect_stats(paths: PipelinePaths, current: StageReport | None = None) -> PipelineStats:
    reports = {}
    for stage in STAGES:
        if current is not None and stage == current.stage:
            reports[stage] = current
            continue
        manifest = paths.manifest(stage)
        if manifest.exists():
            raw = json.loads(manifest.read_text(encoding="utf-8"))
            reports[stage] = StageReport.from_dict(raw["report"])
    return PipelineStats(reports=reports, executed=[])


def _stage_is_complete(paths: PipelinePaths, stage: str) -> bool:
    manifest = paths.manifest(stage)
    if not manifest.exists():
        return False
    try:
        raw = json.loads(manifest.read_text(encoding="utf-8"))
    except json.JSONDecodeError:
        return False
    return all(Path(p).exists() for p in raw.get("outputs", []))


def run_pipeline(cfg: PipelineConfig, stages: list[str] | None = None,
                 resume: bool = True, paths: PipelinePaths | None = None) -> PipelineStats:
    """Run the requested stages (all six by default) and gather the report.

    With resume enabled, stages whose manifest and outputs are intact are
    skipped; the returned stats carry their saved reports plus the list of
    stages actually executed this run.
    """
    selected = list(STAGES) if stages is None else list(stages)
    for stage in selected:
        if stage not in _STAGE_FUNCTIONS:
            raise PipelineError(f"unknown stage {stage!r}")

    if paths is None:
        paths = PipelinePaths(workdir=Path(cfg.workdir))
    paths.workdir.mkdir(parents=True, exist_ok=True)

    executed = []
    for stage in selected:
        if resume and _stage_is_complete(paths, stage):
            logger.info("%s: up to date, skipping", stage)
            continue
        _STAGE_FUNCTIONS[stage](cfg, paths)
        executed.append(stage)

    stats = _collect_stats(paths)
    stats.executed = executed
    return stats
