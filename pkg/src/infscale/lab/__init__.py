"""Experiment registry, configs, seeded ensembles and the command line."""

from .ensemble import THREADS_ENV, default_threads, orbit_rng, run_ensemble
from .registry import REGISTRY, list_experiments
from .runner import replay, run_experiments

__all__ = ["THREADS_ENV", "REGISTRY", "default_threads", "list_experiments", "orbit_rng",
           "replay", "run_ensemble", "run_experiments"]
