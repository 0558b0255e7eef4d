from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..model import Mapping
from ..problem import MappingProblem

# Tags keeping random streams of different purposes apart.
INIT, VELOCITY, SELECT, JUMP, ANT = 1, 2, 3, 4, 5


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for one (seed, component, purpose, id) key.

    Each particle or ant owns its streams and consumes them in iteration
    order, so results do not depend on evaluation order or thread count.
    """
    return np.random.default_rng([int(seed), *(int(k) for k in key)])


@dataclass
class ComponentRun:
    best: np.ndarray
    history: list[float]
    iterations: int = 0
    evaluations: int = 0
    optimal: bool | None = None
    trace: list = field(default_factory=list)


@dataclass
class OptResult:
    algo: str
    mapping: Mapping
    history: list[float]
    iterations: int
    evaluations: int
    optimal: bool | None = None
    trace: list = field(default_factory=list)

    @property
    def cost(self):
        return self.mapping.cost


def combine_runs(algo: str, problem: MappingProblem, runs: list[ComponentRun]) -> OptResult:
    """Merge independent per-component runs into one mapping and history."""
    depth = max((len(r.history) for r in runs), default=0)
    history = [0.0] * depth
    for r in runs:
        for t in range(depth):
            history[t] += r.history[min(t, len(r.history) - 1)]
    optimal = None
    if runs and all(r.optimal is not None for r in runs):
        optimal = all(r.optimal for r in runs)
    return OptResult(
        algo,
        problem.to_mapping([r.best for r in runs]),
        history,
        max((r.iterations for r in runs), default=0),
        sum(r.evaluations for r in runs),
        optimal,
        [r.trace for r in runs],
    )
