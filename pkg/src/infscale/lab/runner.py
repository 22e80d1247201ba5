"""Run experiments and write traces, reports and a manifest.

Output layout under ``out``::

    manifest.json
    <experiment>/report.json
    <experiment>/<trace>.csv      header: checkpoint,value,orbit_id

Everything except the manifest's wall times is a deterministic function
of the resolved configs, so a replay must reproduce every digest.
"""

from __future__ import annotations

import hashlib
import json
import time
from importlib import metadata
from pathlib import Path

import numpy as np

from .config import resolve
from .experiments import ExperimentResult
from .registry import get

MANIFEST = "manifest.json"


def version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    if f.is_integer() and abs(f) < 2**53:
        return str(int(f))
    return "%.17g" % f


def write_trace_csv(path: Path, traces) -> None:
    lines = ["checkpoint,value,orbit_id"]
    for orbit_id, tr in traces:
        for n, v in zip(tr.checkpoints, tr.values):
            lines.append(f"{int(n)},{_fmt(v)},{orbit_id}")
    path.write_text("\n".join(lines) + "\n")


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def execute(cfg: dict, threads: int = 1) -> ExperimentResult:
    entry = get(cfg["experiment"])
    return entry.run(cfg, threads, citation=entry.citation)


def write_result(res: ExperimentResult, cfg: dict, out: Path) -> list[Path]:
    d = out / res.name
    d.mkdir(parents=True, exist_ok=True)
    files = []
    for key, trs in res.traces.items():
        p = d / f"{key}.csv"
        write_trace_csv(p, trs)
        files.append(p)
    report = {"experiment": res.name, "passed": res.passed, "config": cfg,
              "reports": [r.to_dict() for r in res.reports]}
    p = d / "report.json"
    p.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    files.append(p)
    return files


def run_experiments(raw_configs: list[dict], out, threads: int = 1, log=print) -> dict:
    """Resolve every config first, then run and write; return the manifest.

    Config errors (unknown experiment, bad keys) are raised before any
    file or directory is created.
    """
    cfgs = [resolve(c) for c in raw_configs]
    out = Path(out)
    results, files, t_all = {}, [], time.perf_counter()
    for cfg in cfgs:
        t0 = time.perf_counter()
        res = execute(cfg, threads)
        files += write_result(res, cfg, out)
        wall = time.perf_counter() - t0
        results[res.name] = {"passed": res.passed, "wall_seconds": round(wall, 3),
                             "statistics": [{"statistic": r.statistic, "passed": r.passed,
                                             "median": r.median, "pass_fraction": r.pass_fraction}
                                            for r in res.reports]}
        if log:
            log(f"{'PASS' if res.passed else 'FAIL'}  {res.name}  ({wall:.1f} s)")
    manifest = {
        "version": version(),
        "configs": cfgs,
        "threads": threads,
        "wall_seconds": round(time.perf_counter() - t_all, 3),
        "experiments": results,
        "passed": all(r["passed"] for r in results.values()),
        "files": {str(p.relative_to(out)): sha256(p) for p in files},
    }
    (out / MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def replay(manifest_path, out, threads: int = 1, log=print) -> tuple[bool, list[str]]:
    """Rerun a manifest's configs into ``out`` and compare every digest."""
    old = json.loads(Path(manifest_path).read_text())
    new = run_experiments(old["configs"], out, threads, log=log)
    mismatched = sorted(k for k in set(old["files"]) | set(new["files"])
                        if old["files"].get(k) != new["files"].get(k))
    return not mismatched, mismatched
