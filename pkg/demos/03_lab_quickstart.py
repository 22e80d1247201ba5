"""Run two registry experiments at reduced size and replay them.

The lab writes one directory per experiment with plot-ready CSV traces
and a JSON report, plus a manifest that records configs and file
digests.  Replaying the manifest reruns the same configs and must give
byte-identical files, whatever thread count is used.
"""

import json
import tempfile
from pathlib import Path

from infscale.lab import replay, run_experiments

configs = [
    {"experiment": "max-hit-duality", "n_max": 10**5, "ensemble": 5},
    {"experiment": "tent-hit", "n_max": 10**6, "ensemble": 10, "u_hi": 12},
]

with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "run"
    manifest = run_experiments(configs, out)
    for name, res in manifest["experiments"].items():
        print(name, json.dumps(res["statistics"], indent=1))
    same, diff = replay(out / "manifest.json", Path(tmp) / "replay", threads=2)
    print("replay byte-identical:", same, diff)
