"""The whole pipeline over the bundled synthetic crawl.

Builds a six-document fixture crawl (index shard, WARC file, DEM tile,
boundaries, config) in a temporary directory, runs every stage, and prints
the funnel.  Four documents trip one filter each; two survive to export.

The equivalent command line run is:

    gpx-harvest run --config <crawl>/config.json

and a second invocation resumes instead of recomputing: delete only the
export directory and just that stage re-executes from the manifests.
"""

import json
import tempfile
from pathlib import Path

from gpx_harvest import load_config, run_pipeline
from gpx_harvest.synthetic import build_demo_crawl

with tempfile.TemporaryDirectory() as tmp:
    crawl = build_demo_crawl(Path(tmp))
    print("fixture crawl in", tmp)
    print("  shard:     ", crawl.shard.name)
    print("  boundaries:", crawl.boundaries.name)
    print("  config:    ", crawl.config.name)

    cfg = load_config(crawl.config)
    stats = run_pipeline(cfg)
    print()
    print(stats.format_table())

    out_dir = cfg.resolved_out_dir()
    print("\nexports:", sorted(p.name for p in out_dir.iterdir()))

    collection = json.loads((out_dir / "tracks.geojson").read_text("utf-8"))
    for feature in collection["features"]:
        properties = feature["properties"]
        print(f"\n{properties['url']}")
        print(f"  country={properties['country']} lang={properties['desc_lang']} "
              f"elev_source={properties['elev_source']} circular={properties['is_circular']}")
        print(f"  length_2d={properties['length_2d']} m  "
              f"uphill={properties['uphill']} m")
        print(f"  desc: {properties['desc'][:70]}...")

    rerun = run_pipeline(cfg)
    print("\nsecond run executed stages:", rerun.executed or "none (all up to date)")
