"""Ant System placement of clusters onto cores."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgument
from ..problem import MappingProblem
from .common import ANT, ComponentRun, OptResult, combine_runs, stream


@dataclass(frozen=True)
class AcoParams:
    ants: int = 16
    iterations: int = 200
    evaporation: float = 0.1
    pheromone_exp: float = 1.0
    heuristic_exp: float = 2.0
    deposit: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.evaporation < 1.0:
            raise InvalidArgument("evaporation must lie in (0, 1)")
        if self.ants < 1 or self.iterations < 0:
            raise InvalidArgument("need >= 1 ant and >= 0 iterations")


def construction_order(volume: np.ndarray) -> list[int]:
    """Clusters by descending total communication volume, ties by index."""
    totals = volume.sum(axis=1)
    return sorted(range(len(totals)), key=lambda c: (-totals[c], c))


def choose_core(weights: np.ndarray, rng: np.random.Generator) -> int:
    cum = np.cumsum(weights)
    u = rng.random() * cum[-1]
    return int(min(np.searchsorted(cum, u, side="right"), len(weights) - 1))


def construct(comp, tau: np.ndarray, order: list[int], params: AcoParams, rng: np.random.Generator) -> np.ndarray:
    """One ant's placement (length-k array of core indices)."""
    n = tau.shape[1]
    placed = np.full(comp.k, -1, dtype=np.int64)
    free = np.ones(n, dtype=bool)
    for c in order:
        cand = np.flatnonzero(free)
        eta = 1.0 / (1.0 + comp.incremental_energy(c, cand, placed))
        w = tau[c, cand] ** params.pheromone_exp * eta**params.heuristic_exp
        core = int(cand[choose_core(w, rng)])
        placed[c] = core
        free[core] = False
    return placed


def _colony(problem: MappingProblem, ci: int, params: AcoParams, seed: int, record: bool = False) -> ComponentRun:
    comp = problem.components[ci]
    tau = np.ones((comp.k, problem.n_cores))
    order = construction_order(comp.volume)
    best, best_f = None, np.inf
    history = []
    rngs = [stream(seed, ci, ANT, a) for a in range(params.ants)]
    trace = []
    for _ in range(params.iterations):
        ants = np.array([construct(comp, tau, order, params, rngs[a]) for a in range(params.ants)])
        fit = problem.fitness(ci, ants)
        a = int(np.argmin(fit))
        if fit[a] < best_f:
            best, best_f = ants[a].copy(), float(fit[a])
        tau *= 1.0 - params.evaporation
        tau[np.arange(comp.k), ants[a]] += params.deposit / (fit[a] + 1e-12)
        history.append(best_f)
        if record:
            trace.append(tau.copy())
    if best is None:
        best = np.arange(comp.k)
        best_f = float(problem.fitness(ci, best[None, :])[0])
        history.append(best_f)
    return ComponentRun(best, history, params.iterations, params.ants * params.iterations, None, trace)


def run_aco(problem: MappingProblem, params: AcoParams | None = None, seed: int = 0, record: bool = False) -> OptResult:
    """Ant System; with ``record`` the trace holds the pheromone table after each iteration."""
    params = params or AcoParams()
    runs = [_colony(problem, c, params, seed, record) for c in range(len(problem.components))]
    return combine_runs("aco", problem, runs)
