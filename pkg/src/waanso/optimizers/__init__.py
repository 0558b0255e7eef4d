"""Cluster-to-core mapping algorithms."""

from .aco import AcoParams, run_aco
from .common import OptResult
from .exact import run_bnb, run_brute
from .swaps import apply_swaps, diff_swaps, random_swaps
from .swarm import (
    AsoParams,
    Particle,
    PsoParams,
    aso_position_update,
    aso_select_gbest,
    compose_velocity,
    run_aso,
    run_dpso,
)

ALGORITHMS = ("aso", "dpso", "aco", "bnb", "brute")

__all__ = [
    "ALGORITHMS",
    "AcoParams",
    "AsoParams",
    "OptResult",
    "Particle",
    "PsoParams",
    "apply_swaps",
    "aso_position_update",
    "aso_select_gbest",
    "compose_velocity",
    "diff_swaps",
    "random_swaps",
    "run_aco",
    "run_aso",
    "run_bnb",
    "run_brute",
    "run_dpso",
]
