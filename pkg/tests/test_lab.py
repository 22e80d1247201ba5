import csv
import json

import numpy as np
import pytest

from infscale.lab import REGISTRY, list_experiments, orbit_rng, run_ensemble
from infscale.lab.cli import EXIT_ERROR, main
from infscale.lab.config import InvalidConfig, load_config, resolve
from infscale.lab.ensemble import THREADS_ENV, default_threads
from infscale.lab.registry import UnknownExperiment
from infscale.lab.runner import replay, run_experiments

SMALL = {"experiment": "max-hit-duality", "n_max": 20000, "ensemble": 4}
SMALL_SUMS = {"experiment": "spdc-sums", "n_max": 20000, "ensemble": 3}


def test_catalog():
    cat = list_experiments()
    assert len(cat) == 15
    assert {e["name"] for e in cat} == set(REGISTRY)
    assert all(e["citation"] for e in cat)
    gb = next(e for e in cat if e["name"] == "gamma-bound")
    assert "Appendix" in gb["citation"]


def test_every_criterion_has_an_experiment():
    crit = {c for e in list_experiments() for c in e["criteria"]}
    assert crit == set(range(1, 12))


def test_resolve_defaults_and_overrides():
    cfg = resolve({"experiment": "loglaw", "n_max": "1e5", "alphas": [1, 2]})
    assert cfg["n_max"] == 100000 and isinstance(cfg["n_max"], int)
    assert cfg["ratio"] == 1.2 and cfg["ensemble"] == 100


@pytest.mark.parametrize("raw, msg", [
    ({"experiment": "loglaw", "bogus": 1}, "unknown"),
    ({"experiment": "loglaw", "n_max": "many"}, "n_max"),
    ({"experiment": "loglaw", "ratio": 1.0}, "ratio"),
    ({"experiment": "loglaw", "ensemble": 0}, "ensemble"),
])
def test_config_errors(raw, msg):
    with pytest.raises(InvalidConfig, match=msg):
        resolve(raw)


def test_unknown_experiment():
    with pytest.raises(UnknownExperiment) as e:
        resolve({"experiment": "nope"})
    assert "loglaw" in str(e.value)


def test_yaml_config(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("experiment: tent-hit\nn_max: 1e5\nu_hi: 9\n")
    cfg = resolve(load_config(p))
    assert cfg["experiment"] == "tent-hit" and cfg["n_max"] == 10**5
    p.write_text("experiment: tent-hit\nnested:\n  a: 1\n")
    with pytest.raises(InvalidConfig, match="nested"):
        load_config(p)


def test_unknown_experiment_writes_nothing(tmp_path):
    out = tmp_path / "out"
    with pytest.raises(UnknownExperiment):
        run_experiments([SMALL, {"experiment": "nope"}], out, log=None)
    assert not out.exists()


def test_cli_exit_codes(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["run", "nope", "--out", str(out)]) == EXIT_ERROR
    assert not out.exists()
    assert main(["run", "--out", str(out)]) == EXIT_ERROR
    bad = tmp_path / "bad.yaml"
    bad.write_text("experiment: loglaw\nwhatever: 3\n")
    assert main(["run", "--config", str(bad), "--out", str(out)]) == EXIT_ERROR
    assert main(["replay", str(tmp_path / "missing.json")]) == EXIT_ERROR


def test_cli_list(capsys):
    assert main(["list"]) == 0
    text = capsys.readouterr().out
    assert text.count("\n") == 15 and "gamma-bound" in text
    assert main(["list", "--json"]) == 0
    assert len(json.loads(capsys.readouterr().out)) == 15


def test_cli_run_and_replay(tmp_path):
    cfg = tmp_path / "small.yaml"
    cfg.write_text("experiment: max-hit-duality\nn_max: 20000\nensemble: 4\n")
    out = tmp_path / "run"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--seed", "7"]) == 0
    man = json.loads((out / "manifest.json").read_text())
    assert man["configs"][0]["seed"] == 7 and man["passed"]
    assert main(["replay", str(out / "manifest.json"), "--out", str(tmp_path / "re")]) == 0


def test_output_layout_and_replay(tmp_path):
    out = tmp_path / "a"
    man = run_experiments([SMALL_SUMS], out, log=None)
    exp = out / "spdc-sums"
    assert (exp / "report.json").exists()
    assert set(man["files"]) == {str(p.relative_to(out)) for p in exp.iterdir()}
    traces = [p for p in exp.iterdir() if p.suffix == ".csv"]
    assert traces
    with open(traces[0]) as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["checkpoint", "value", "orbit_id"]
    orbits = {int(r[2]) for r in rows[1:]}
    assert orbits == {0, 1, 2}
    ok, bad = replay(out / "manifest.json", tmp_path / "b", log=None)
    assert ok and not bad
    for name in man["files"]:
        assert (out / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_thread_count_does_not_change_results(tmp_path):
    m1 = run_experiments([SMALL_SUMS], tmp_path / "t1", threads=1, log=None)
    m2 = run_experiments([SMALL_SUMS], tmp_path / "t2", threads=3, log=None)
    assert m1["files"] == m2["files"]


def test_replay_detects_changes(tmp_path):
    out = tmp_path / "a"
    run_experiments([SMALL], out, log=None)
    man = json.loads((out / "manifest.json").read_text())
    key = sorted(man["files"])[0]
    man["files"][key] = "0" * 64
    (out / "manifest.json").write_text(json.dumps(man))
    ok, bad = replay(out / "manifest.json", tmp_path / "b", log=None)
    assert not ok and bad == [key]


def test_threads_env(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert default_threads() == 3
    monkeypatch.setenv(THREADS_ENV, "junk")
    assert default_threads() == 1
    monkeypatch.delenv(THREADS_ENV)
    assert default_threads() == 1


def test_orbit_rng_streams_are_independent():
    a = orbit_rng(1, 0, 0).random(4)
    assert np.array_equal(a, orbit_rng(1, 0, 0).random(4))
    assert not np.array_equal(a, orbit_rng(1, 1, 0).random(4))
    assert not np.array_equal(a, orbit_rng(1, 0, 1).random(4))
    assert not np.array_equal(a, orbit_rng(1, 0, 0, attempt=1).random(4))


def test_run_ensemble_order_and_redraw():
    from infscale.dynamics import SingularHit

    def fn(i, rng):
        if i == 2 and rng.random() < 0.9:
            raise SingularHit("landed on the fixed point")
        return i

    assert run_ensemble(fn, 6, 5, threads=1) == list(range(6))
    assert run_ensemble(fn, 6, 5, threads=2) == list(range(6))
