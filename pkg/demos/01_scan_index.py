"""Scan a crawl index shard for GPX candidates.

Index shards are CDX-J: each line is a sortable key, a timestamp, and a JSON
payload naming the URL, the WARC file, and the byte range of the capture.
The scan keeps lines whose MIME type mentions gpx or whose URL path ends in
.gpx, and is resilient to corrupt lines.
"""

import tempfile
from pathlib import Path

from gpx_harvest import ScanStats, iter_shard_lines, scan_index
from gpx_harvest.synthetic import cdxj_line, write_index_shard

with tempfile.TemporaryDirectory() as tmp:
    shard = Path(tmp) / "cdx-00000.gz"
    write_index_shard(shard, [
        cdxj_line("https://walks.example/routes/ridge.gpx",
                  "crawl-data/CC-MAIN-2024-10/seg/warc/a.warc.gz", 0, 900),
        cdxj_line("https://walks.example/index.html",
                  "crawl-data/CC-MAIN-2024-10/seg/warc/a.warc.gz", 900, 4000,
                  mime="text/html"),
        cdxj_line("https://velo.example/tour.GPX?download=1",
                  "crawl-data/CC-MAIN-2024-10/seg/warc/b.warc.gz", 0, 1200,
                  mime="text/xml"),
        "this line is corrupt and will be counted, not fatal",
    ])

    stats = ScanStats()
    print("candidates found:")
    for record in scan_index(iter_shard_lines(shard), stats):
        print(f"  {record.url}")
        print(f"    -> {record.warc_file} @ {record.warc_offset}+{record.warc_len} "
              f"({record.crawl_id})")

    print(f"\nlines={stats.lines} candidates={stats.candidates} "
          f"not_candidate={stats.not_candidate} malformed={stats.malformed}")
