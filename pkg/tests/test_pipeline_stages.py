"""Stage-level exclusion paths not exercised by the golden fixture."""

import hashlib
import json

from gpx_harvest import judges
from gpx_harvest.config import PipelineConfig
from gpx_harvest.pipeline import (PipelinePaths, stage_enrich, stage_metrics,
                                  stage_parse, write_jsonl)
from gpx_harvest.synthetic import gpx_xml, line_points

GOOD_DESC = ("A long and rewarding walk through the valley and up to the old "
             "watchtower, with a steady climb and a fine descent through the woods.")


def seed_fetched(paths, payloads):
    """Write payload files plus the fetched.jsonl the parse stage reads."""
    paths.raw_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for i, payload in enumerate(payloads):
        digest = hashlib.sha256(payload).hexdigest()
        payload_path = paths.raw_dir / f"{digest}.gpx"
        payload_path.write_bytes(payload)
        rows.append({"url": f"http://t.example/{i}.gpx", "mime_detected": "application/gpx+xml",
                     "warc_file": "crawl-data/CC-MAIN-2024-10/w.warc.gz",
                     "warc_offset": i * 1000, "warc_len": 999,
                     "crawl_id": "CC-MAIN-2024-10", "content_hash": digest,
                     "payload": str(payload_path)})
    write_jsonl(paths.fetched, rows)
    return rows


def good_track_payload(desc=GOOD_DESC):
    return gpx_xml([{"name": "ok", "desc": desc,
                     "segments": [line_points(50.0, 6.0, 30, 50.0, ele=100.0)]}])


def test_parse_stage_counts_parse_error_and_no_track(tmp_path):
    cfg = PipelineConfig(workdir=tmp_path)
    paths = PipelinePaths(workdir=tmp_path)
    seed_fetched(paths, [
        b"<html>error page served with a .gpx name</html>",
        gpx_xml([{"segments": [[]]}]),  # a track with zero points
        good_track_payload(),
    ])
    report = stage_parse(cfg, paths)
    assert report.excluded == {"parse-error": 1, "no-track": 1}
    assert report.outputs == 1


def seed_parsed(paths, descs):
    rows = []
    for i, desc in enumerate(descs):
        rows.append({"url": f"http://t.example/{i}.gpx", "mime_detected": "",
                     "warc_file": "w.warc.gz", "warc_offset": 0, "warc_len": 9,
                     "crawl_id": "c", "content_hash": f"h{i}", "name": f"t{i}",
                     "desc": desc, "length_2d": 2000.0,
                     "segments": [[[50.0, 6.0, 100.0], [50.01, 6.0, 110.0]]]})
    write_jsonl(paths.parsed, rows)
    return rows


class KeywordJudge:
    """Quality false when the text mentions 'boring'; PII true on 'named'."""

    def __call__(self, prompt):
        if prompt.startswith(judges.PII_PROMPT_TEMPLATE[:60]):
            return "True" if "named" in prompt else "False"
        return "False" if "boring" in prompt else "True"


def test_enrich_stage_exclusion_reasons(tmp_path, monkeypatch):
    from gpx_harvest import pipeline as pipeline_module

    cfg = PipelineConfig(workdir=tmp_path)
    cfg.filters.rare_lang_cutoff = 0
    paths = PipelinePaths(workdir=tmp_path)
    seed_parsed(paths, [
        GOOD_DESC,                                      # kept
        "too short",                                    # desc-too-short
        "x" * 2500,                                     # desc-too-long
        GOOD_DESC + " boring",                          # low-quality
        GOOD_DESC + " named",                           # pii
        "zzkw qqpt xxvr mmjq bbfd ggxx " * 3,           # unknown-lang
    ])
    monkeypatch.setattr(pipeline_module, "_build_judge", lambda cfg: KeywordJudge())
    report = stage_enrich(cfg, paths)
    assert report.excluded == {"desc-too-short": 1, "desc-too-long": 1,
                               "low-quality": 1, "pii": 1, "unknown-lang": 1}
    assert report.outputs == 1


def test_enrich_stage_judge_unavailable(tmp_path, monkeypatch):
    from gpx_harvest import pipeline as pipeline_module

    def broken_judge(prompt):
        raise judges.JudgeUnavailableError("endpoint down")

    cfg = PipelineConfig(workdir=tmp_path)
    paths = PipelinePaths(workdir=tmp_path)
    seed_parsed(paths, [GOOD_DESC, GOOD_DESC])
    monkeypatch.setattr(pipeline_module, "_build_judge", lambda cfg: broken_judge)
    report = stage_enrich(cfg, paths)
    assert report.excluded == {"judge-unavailable": 2}
    assert report.outputs == 0
    assert report.failures() == 2


def test_enrich_stage_translation_failed(tmp_path, monkeypatch):
    from gpx_harvest import pipeline as pipeline_module

    german = ("Eine lange und lohnende Wanderung durch das Tal hinauf zum alten "
              "Wachturm, mit stetigem Anstieg und schönem Abstieg durch den Wald.")

    def broken_translator(text, lang):
        raise judges.TranslationFailedError("model missing")

    cfg = PipelineConfig(workdir=tmp_path)
    cfg.filters.rare_lang_cutoff = 0
    paths = PipelinePaths(workdir=tmp_path)
    seed_parsed(paths, [german])
    monkeypatch.setattr(pipeline_module, "_build_translator", lambda cfg: broken_translator)
    report = stage_enrich(cfg, paths)
    assert report.excluded == {"translation-failed": 1}


def test_enrich_stage_rare_language_cut(tmp_path):
    cfg = PipelineConfig(workdir=tmp_path)  # default cutoff 5
    paths = PipelinePaths(workdir=tmp_path)
    seed_parsed(paths, [GOOD_DESC] * 3)  # three English rows, cutoff five
    report = stage_enrich(cfg, paths)
    assert report.excluded == {"rare-lang": 3}
    assert report.outputs == 0


def seed_enriched(paths, segments, desc_lang="en"):
    rows = [{"url": "http://t.example/0.gpx", "mime_detected": "", "warc_file": "w",
             "warc_offset": 0, "warc_len": 9, "crawl_id": "c", "content_hash": "h0",
             "name": "t", "desc": GOOD_DESC, "desc_lang": desc_lang,
             "desc_en": GOOD_DESC, "pii_flags": {"email": False, "url": False, "phone": False},
             "length_2d": 2000.0, "segments": segments}]
    write_jsonl(paths.enriched, rows)
    return rows


def test_metrics_stage_elevation_unavailable_without_tiles(tmp_path):
    cfg = PipelineConfig(workdir=tmp_path)  # no srtm_dir configured
    paths = PipelinePaths(workdir=tmp_path)
    seed_enriched(paths, [[[50.0, 6.0, None], [50.01, 6.0, None]]])
    report = stage_metrics(cfg, paths)
    assert report.excluded == {"elevation-unavailable": 1}
    assert report.outputs == 0


def test_metrics_stage_country_unknown_without_boundaries(tmp_path):
    cfg = PipelineConfig(workdir=tmp_path)  # no boundaries file
    paths = PipelinePaths(workdir=tmp_path)
    seed_enriched(paths, [[[50.0, 6.0, 100.0], [50.01, 6.0, 110.0]]])
    report = stage_metrics(cfg, paths)
    assert report.outputs == 1
    assert report.info.get("country_unknown") == 1
    record = json.loads(paths.final.read_text("utf-8").splitlines()[0])["record"]
    assert record["country"] == "Unknown"
    assert record["elev_source"] == "GPS"


def test_enrich_stage_with_command_translator(tmp_path):
    import sys

    german = ("Eine lange und lohnende Wanderung durch das Tal hinauf zum alten "
              "Wachturm, mit stetigem Anstieg und schönem Abstieg durch den Wald.")
    cfg = PipelineConfig(workdir=tmp_path)
    cfg.filters.rare_lang_cutoff = 0
    cfg.translator = (f'{sys.executable} -c "import sys; '
                      f"sys.stdout.write('[{{lang}}] ' + sys.stdin.read().upper())\"")
    paths = PipelinePaths(workdir=tmp_path)
    seed_parsed(paths, [german])
    report = stage_enrich(cfg, paths)
    assert report.outputs == 1
    row = json.loads(paths.enriched.read_text("utf-8").splitlines()[0])
    assert row["desc_lang"] == "de"
    assert row["desc_en"].startswith("[de] EINE LANGE")
