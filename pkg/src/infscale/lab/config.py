"""Flat key-value experiment configs.

A config file is a YAML mapping with scalar or list values and no
nesting, for example::

    experiment: loglaw
    n_max: 100000000
    alphas: [1.0, 2.0]
    seed: 7

Keys not known to the experiment are rejected.  Numeric values may be
written in any form YAML or Python accepts (``1e7`` included).
"""

from __future__ import annotations

from pathlib import Path

import yaml

from .registry import default_config, get

RUN_KEYS = ("window",)  # optional keys every experiment understands


class InvalidConfig(ValueError):
    pass


def load_config(path) -> dict:
    text = Path(path).read_text()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise InvalidConfig(f"{path}: not valid YAML ({e})") from None
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise InvalidConfig(f"{path}: top level must be a key-value mapping")
    for k, v in raw.items():
        if isinstance(v, dict):
            raise InvalidConfig(f"key {k!r}: nested mappings are not allowed")
    return raw


def _coerce(key, value, default):
    if isinstance(default, bool):
        if isinstance(value, bool):
            return value
        raise InvalidConfig(f"key {key!r}: expected true/false, got {value!r}")
    if isinstance(default, (int, float)):
        if isinstance(value, str):
            try:
                value = float(value)
            except ValueError:
                raise InvalidConfig(f"key {key!r}: expected a number, got {value!r}") from None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InvalidConfig(f"key {key!r}: expected a number, got {value!r}")
        if isinstance(default, int):
            if float(value) != int(value):
                raise InvalidConfig(f"key {key!r}: expected an integer, got {value!r}")
            return int(value)
        return float(value)
    if isinstance(default, list):
        if not isinstance(value, list):
            value = [value]
        return [_coerce(key, v, default[0]) if default else v for v in value]
    return value


def resolve(raw: dict, name: str | None = None) -> dict:
    """Merge ``raw`` over the registry defaults of its experiment."""
    raw = dict(raw)
    name = raw.pop("experiment", name)
    if name is None:
        raise InvalidConfig("config names no experiment")
    get(name)  # unknown names fail before anything else
    cfg = default_config(name)
    for k, v in raw.items():
        if k in RUN_KEYS:
            if isinstance(v, list) and len(v) == 2:
                cfg[k] = [float(x) for x in v]
            else:
                cfg[k] = _coerce(k, v, 0.25)
            continue
        if k not in cfg:
            raise InvalidConfig(f"unknown key {k!r} for experiment {name!r}")
        cfg[k] = _coerce(k, v, cfg[k])
    if cfg["n_max"] < 2 or cfg["ensemble"] < 1 or cfg["ratio"] <= 1.0:
        raise InvalidConfig("need n_max >= 2, ensemble >= 1 and ratio > 1")
    return cfg
