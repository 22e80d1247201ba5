"""Scaling laws of Birkhoff sums, maxima and hitting times for infinite-measure
and slowly mixing maps: concrete maps, process monitors, estimators and an
experiment lab."""

from importlib.metadata import PackageNotFoundError, version as _version

from .diophantine import ContinuedFraction, construct_type, construct_Y_xi_pair, convergents
from .dynamics import (
    LSV,
    CheckpointSchedule,
    CircleRotation,
    Doubling,
    InducedSystem,
    Point,
    SkewDoublingCircle,
    SkewDoublingTorus2,
    Tent,
    iterate_with_checkpoints,
    random_point,
    step,
)
from .estimators import ScalingReport, ensemble_aggregate, loglog_slope, tail_liminf_limsup
from .observables import BallIndicator, DistPower, NegLogDist, PsiOfDist, Target
from .tower import TowerPoint, TowerSpec, tower_step
from .traces import HittingRecord, ProcessTrace

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0+unknown"

__all__ = [
    "LSV", "BallIndicator", "CheckpointSchedule", "CircleRotation", "ContinuedFraction",
    "DistPower", "Doubling", "HittingRecord", "InducedSystem", "NegLogDist", "Point",
    "ProcessTrace", "PsiOfDist", "ScalingReport", "SkewDoublingCircle", "SkewDoublingTorus2",
    "Target", "Tent", "TowerPoint", "TowerSpec", "construct_Y_xi_pair", "construct_type",
    "convergents", "ensemble_aggregate", "iterate_with_checkpoints", "loglog_slope",
    "random_point", "step", "tail_liminf_limsup", "tower_step",
]
