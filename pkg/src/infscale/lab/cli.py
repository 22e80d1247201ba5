"""Command line entry point: ``infscale {run,list,replay}``."""

from __future__ import annotations

import argparse
import json
import sys
import tempfile

from .config import InvalidConfig, load_config
from .ensemble import THREADS_ENV, default_threads
from .registry import REGISTRY, UnknownExperiment, list_experiments
from .runner import replay, run_experiments

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="infscale", description="Scaling-law experiments for "
                                "Birkhoff sums, maxima and hitting times.")
    sub = p.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", help="run experiments (default configs unless --config)")
    r.add_argument("experiments", nargs="*", metavar="NAME",
                   help="registry names, or 'all' for the whole acceptance suite")
    r.add_argument("--config", help="flat YAML config file")
    r.add_argument("--out", default="runs", help="output directory (default: runs)")
    r.add_argument("--seed", type=int, help="master seed override")
    r.add_argument("--n-max", type=float, dest="n_max", help="horizon override")
    r.add_argument("--threads", type=int, default=None,
                   help=f"worker threads (default: ${THREADS_ENV} or 1)")

    ls = sub.add_parser("list", help="show the experiment catalog")
    ls.add_argument("--json", action="store_true", help="machine-readable output")

    rp = sub.add_parser("replay", help="rerun a manifest and compare file digests")
    rp.add_argument("manifest")
    rp.add_argument("--out", help="output directory (default: a temporary directory)")
    rp.add_argument("--threads", type=int, default=None)
    return p


def _configs(args) -> list[dict]:
    raws = []
    if args.config:
        raws.append(load_config(args.config))
    names = list(args.experiments)
    if names == ["all"]:
        names = list(REGISTRY)
    raws += [{"experiment": n} for n in names]
    if not raws:
        raise InvalidConfig("name an experiment or pass --config")
    for raw in raws:
        if args.seed is not None:
            raw["seed"] = args.seed
        if args.n_max is not None:
            raw["n_max"] = args.n_max
    return raws


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.cmd == "list":
        cat = list_experiments()
        if args.json:
            print(json.dumps(cat, indent=2))
        else:
            for e in cat:
                crit = ",".join(map(str, e["criteria"])) or "-"
                print(f"{e['name']:<22} [{crit:>4}]  {e['citation']}")
        return EXIT_PASS

    threads = args.threads if args.threads is not None else default_threads()
    try:
        if args.cmd == "run":
            manifest = run_experiments(_configs(args), args.out, threads)
            print(f"{'all passed' if manifest['passed'] else 'some experiments FAILED'}; "
                  f"manifest at {args.out}/manifest.json")
            return EXIT_PASS if manifest["passed"] else EXIT_FAIL
        out = args.out or tempfile.mkdtemp(prefix="infscale-replay-")
        ok, bad = replay(args.manifest, out, threads)
        if ok:
            print(f"replay identical ({out})")
            return EXIT_PASS
        print("replay differs in: " + ", ".join(bad), file=sys.stderr)
        return EXIT_FAIL
    except (UnknownExperiment, InvalidConfig, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except RuntimeError as e:  # numerical-policy failures carry the orbit seed
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
