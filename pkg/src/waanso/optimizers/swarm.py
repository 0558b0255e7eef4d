"""Discrete PSO over placements, and its ant-swarm (ASO) variant.

A particle's position is a full permutation of core indices (clusters padded
with empty ones up to the core count); its velocity is a swap sequence.
ASO changes two things per iteration: the guiding global best is picked by
an ACO-style transition rule over the personal bests, and with small
probability a particle jumps to a random neighbourhood of the true global
best instead of following its velocity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidArgument
from ..problem import MappingProblem
from .common import INIT, JUMP, SELECT, VELOCITY, ComponentRun, OptResult, combine_runs, stream
from .swaps import apply_swaps, diff_swaps, random_swaps


@dataclass(frozen=True)
class PsoParams:
    omega: float = 0.5
    c1: float = 1.0
    c2: float = 1.0
    population: int = 32
    iterations: int = 200

    def __post_init__(self):
        if not 0.0 <= self.omega <= 1.0:
            raise InvalidArgument("omega must lie in [0, 1]")
        if self.c1 < 0 or self.c2 < 0:
            raise InvalidArgument("acceleration constants must be non-negative")
        if self.population < 2:
            raise InvalidArgument("population must be >= 2")
        if self.iterations < 0:
            raise InvalidArgument("iterations must be >= 0")


@dataclass(frozen=True)
class AsoParams:
    pso: PsoParams = field(default_factory=PsoParams)
    q0: float = 0.8
    q1: float = 0.1
    jump_max_frac: float = 0.25

    def __post_init__(self):
        if not (0.0 <= self.q0 <= 1.0 and 0.0 <= self.q1 <= 1.0):
            raise InvalidArgument("q0 and q1 must lie in [0, 1]")
        if self.jump_max_frac <= 0:
            raise InvalidArgument("jump_max_frac must be > 0")


@dataclass
class Particle:
    position: np.ndarray
    velocity: list
    p_best: np.ndarray
    p_best_fitness: float
    stream_id: int = 0


def compose_velocity(particle: Particle, g_best, params: PsoParams, rng: np.random.Generator) -> list:
    """Inertia prefix of the old velocity plus randomly thinned pulls to both bests."""
    n = len(particle.position)
    keep = math.ceil(params.omega * len(particle.velocity))
    out = list(particle.velocity[:keep])
    r1, r2 = rng.random(2)
    for target, c, r in ((particle.p_best, params.c1, r1), (g_best, params.c2, r2)):
        prob = min(1.0, c * r)
        d = diff_swaps(particle.position, target)
        if d:
            mask = rng.random(len(d)) < prob
            out.extend(s for s, m in zip(d, mask) if m)
    return out[:n]


def aso_select_gbest(p_best_fitness, q0: float, rng: np.random.Generator) -> int:
    """Exploit the best personal best with probability q0, else roulette on 1/fitness."""
    f = np.asarray(p_best_fitness, dtype=float)
    if len(f) == 0:
        raise InvalidArgument("need at least one fitness value")
    q = rng.random()
    if q < q0:
        return int(np.argmin(f))
    w = 1.0 / (f + 1e-12)
    cum = np.cumsum(w)
    u = rng.random() * cum[-1]
    return int(min(np.searchsorted(cum, u, side="right"), len(f) - 1))


def aso_position_update(position, velocity, g_best, q1: float, jump_max_frac: float, rng: np.random.Generator) -> np.ndarray:
    """Follow the velocity, or with probability q1 jump to a shuffle of the global best."""
    q = rng.random()
    if q >= q1:
        return apply_swaps(position, velocity)
    n = len(position)
    length = int(rng.integers(1, max(1, math.ceil(jump_max_frac * n)) + 1))
    return apply_swaps(g_best, random_swaps(n, length, rng))


def _swarm(problem: MappingProblem, comp: int, pso: PsoParams, seed: int, aso: AsoParams | None, record: bool) -> ComponentRun:
    k = problem.components[comp].k
    n = problem.n_cores
    pop = pso.population

    def evaluate(rows):
        return problem.fitness(comp, np.asarray(rows)[:, :k])

    positions = np.array([stream(seed, comp, INIT, i).permutation(n) for i in range(pop)])
    fit = evaluate(positions)
    particles = [Particle(positions[i].copy(), [], positions[i].copy(), float(fit[i]), i) for i in range(pop)]
    best_fit = np.array([p.p_best_fitness for p in particles])
    g = int(np.argmin(best_fit))
    history = [float(best_fit[g])]
    vel_rng = [stream(seed, comp, VELOCITY, i) for i in range(pop)]
    jump_rng = [stream(seed, comp, JUMP, i) for i in range(pop)]
    select_rng = stream(seed, comp, SELECT)
    trace = []
    if record:
        trace.append((positions.copy(), fit.copy()))
    for it in range(pso.iterations):
        if aso is None:
            guide = particles[g].p_best
        else:
            guide = particles[aso_select_gbest(best_fit, aso.q0, select_rng)].p_best
        g_best = particles[g].p_best
        new_positions = []
        for i, part in enumerate(particles):
            v = compose_velocity(part, guide, pso, vel_rng[i])
            part.velocity = v
            if aso is None:
                new_positions.append(apply_swaps(part.position, v))
            else:
                new_positions.append(
                    aso_position_update(part.position, v, g_best, aso.q1, aso.jump_max_frac, jump_rng[i])
                )
        positions = np.array(new_positions)
        fit = evaluate(positions)
        for i, part in enumerate(particles):
            part.position = positions[i]
            if fit[i] < part.p_best_fitness:
                part.p_best = positions[i].copy()
                part.p_best_fitness = float(fit[i])
                best_fit[i] = fit[i]
        g = int(np.argmin(best_fit))
        history.append(float(best_fit[g]))
        if record:
            trace.append((positions.copy(), fit.copy()))
    return ComponentRun(
        particles[g].p_best.copy(), history, pso.iterations, pop * (pso.iterations + 1), None, trace
    )


def run_dpso(problem: MappingProblem, params: PsoParams | None = None, seed: int = 0, record: bool = False) -> OptResult:
    params = params or PsoParams()
    runs = [_swarm(problem, c, params, seed, None, record) for c in range(len(problem.components))]
    return combine_runs("dpso", problem, runs)


def run_aso(problem: MappingProblem, params: AsoParams | None = None, seed: int = 0, record: bool = False) -> OptResult:
    params = params or AsoParams()
    runs = [_swarm(problem, c, params.pso, seed, params, record) for c in range(len(problem.components))]
    return combine_runs("aso", problem, runs)
