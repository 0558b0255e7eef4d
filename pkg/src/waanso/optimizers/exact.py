"""Exhaustive enumeration and depth-first branch-and-bound."""

from __future__ import annotations

import itertools
import math
import time

import numpy as np

from ..errors import GuardError
from ..problem import MappingProblem
from .aco import construction_order
from .common import ComponentRun, OptResult, combine_runs

BRUTE_LIMIT = 10**7
_CHUNK = 16384


def _brute_component(problem: MappingProblem, ci: int) -> ComponentRun:
    comp = problem.components[ci]
    n, k = problem.n_cores, comp.k
    count = math.perm(n, k)
    if count > BRUTE_LIMIT:
        raise GuardError(f"{count} arrangements exceed the brute-force guard of {BRUTE_LIMIT}")
    it = itertools.permutations(range(n), k)
    best, best_f = None, np.inf
    while True:
        chunk = list(itertools.islice(it, _CHUNK))
        if not chunk:
            break
        rows = np.array(chunk, dtype=np.int64).reshape(len(chunk), k)
        fit = problem.fitness(ci, rows)
        i = int(np.argmin(fit))
        if fit[i] < best_f:
            best, best_f = rows[i].copy(), float(fit[i])
    return ComponentRun(best, [best_f], 1, count, True)


def run_brute(problem: MappingProblem) -> OptResult:
    """Global optimum by enumeration; ties go to the lexicographically smallest placement."""
    runs = [_brute_component(problem, c) for c in range(len(problem.components))]
    return combine_runs("brute", problem, runs)


class _Stop(Exception):
    pass


def _bnb_component(problem: MappingProblem, ci: int, deadline: float | None, node_limit: int | None) -> ComponentRun:
    comp = problem.components[ci]
    n, k = problem.n_cores, comp.k
    order = construction_order(comp.volume)
    pos = np.full(k, -1, dtype=np.int64)
    free = np.ones(n, dtype=bool)
    state = {"best": None, "f": np.inf, "nodes": 0, "history": []}

    def out_of_budget():
        if deadline is not None and time.perf_counter() >= deadline:
            return True
        return node_limit is not None and state["nodes"] >= node_limit

    def descend(depth):
        c = order[depth]
        cores = np.flatnonzero(free)
        rows = np.repeat(pos[None, :], len(cores), axis=0)
        rows[:, c] = cores
        bounds = problem.fitness(ci, rows)
        state["nodes"] += len(cores)
        leaf = depth == k - 1
        for core, bound in zip(cores, bounds):
            if bound >= state["f"]:
                continue
            if leaf:
                state["best"] = rows[0].copy()
                state["best"][c] = core
                state["f"] = float(bound)
                state["history"].append(state["f"])
                if out_of_budget():
                    raise _Stop
                continue
            if state["best"] is not None and out_of_budget():
                raise _Stop
            pos[c] = core
            free[core] = False
            descend(depth + 1)
            pos[c] = -1
            free[core] = True

    optimal = True
    try:
        descend(0)
    except _Stop:
        optimal = False
    return ComponentRun(state["best"], state["history"], len(state["history"]), state["nodes"], optimal)


def run_bnb(problem: MappingProblem, time_limit_ms: float | None = None, node_limit: int | None = None) -> OptResult:
    """Depth-first branch-and-bound over cluster-to-core assignments.

    The bound prices every route that touches an unplaced cluster at one
    hop, the cheapest distance two distinct cores can have; both energy and
    the list-scheduling makespan are monotone in route length, so it never
    overestimates.  ``optimal`` is False when the time or node budget ran
    out first (the incumbent is still returned).  ``node_limit`` is the
    deterministic alternative to a wall-clock limit.
    """
    start = time.perf_counter()
    runs = []
    for c in range(len(problem.components)):
        deadline = None if time_limit_ms is None else start + time_limit_ms / 1000.0
        runs.append(_bnb_component(problem, c, deadline, node_limit))
    return combine_runs("bnb", problem, runs)
