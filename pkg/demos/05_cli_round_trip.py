"""
Generate a corpus file and analyse it from the command line
===========================================================

Equivalent shell session::

    scootsafe generate --spec corpus.json --out tracks.csv
    scootsafe analyze --input tracks.csv --out results
"""

import json
import tempfile
from pathlib import Path

from scootsafe.cli import main

doc = {
    "seed": 21,
    "groups": [
        {"count": 6, "geometry": "crossing_from_left", "vehicle_speed": [6, 12], "escooter_speed": [3, 6],
         "designed_gap": [-2, 2], "id_prefix": "cl"},
        {"count": 6, "geometry": "crossing_from_right", "vehicle_speed": [6, 12], "escooter_speed": [3, 6],
         "designed_gap": [4, 9], "id_prefix": "cr"},
        {"count": 4, "geometry": "parallel_same_direction", "vehicle_speed": 9, "escooter_speed": 4,
         "dataset": "escooter_centered", "id_prefix": "ps"},
    ],
}

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    (tmp / "corpus.json").write_text(json.dumps(doc))
    main(["generate", "--spec", str(tmp / "corpus.json"), "--out", str(tmp / "tracks.csv")])
    code = main(["analyze", "--input", str(tmp / "tracks.csv"), "--out", str(tmp / "results")])
    print("exit code", code)

    report = json.loads((tmp / "results" / "report.json").read_text())
    for group, summary in report["summary"].items():
        print(f"{group:20s} {summary['n_cases']:3d} cases, {summary['n_potential_conflict']} potential conflicts")
    print((tmp / "results" / "cases.csv").read_text().splitlines()[0])
    print(sorted(p.name for p in (tmp / "results").iterdir()))
