"""Batched evaluation of cluster placements.

A :class:`MappingProblem` splits the clusters into independent components
(clusters that share no application never compete for a core, see
:func:`waanso.model.conflict_groups`).  Each component is a plain
assignment problem: place ``k`` clusters on ``k`` distinct cores out of
``n``.  Placements are integer arrays of shape ``(batch, k)`` holding core
indices; ``-1`` marks a cluster that is not placed yet, for which every
route is priced at the cheapest possible distance of one hop (used by the
branch-and-bound lower bound).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .cost import CostBreakdown, CostParams, EnergyParams
from .errors import InfeasibleError, InvalidArgument
from .model import Clustering, GeneratorConfig, Mapping, Topology, Workload, conflict_groups, generate_workload


@dataclass
class _AppSchedule:
    # One row per task in topological order.
    cluster: list[int]
    compute: list[float]
    # preds[i] = [(order position of u, same cluster, vol / bandwidth), ...]
    preds: list[list[tuple[int, bool, float]]]


class Component:
    """Clusters that must be injectively placed together."""

    def __init__(self, clusters: list[int], w: Workload, clustering: Clustering, t: Topology, p: EnergyParams):
        self.clusters = list(clusters)
        self.k = len(clusters)
        self.n_cores = t.n_cores
        self.energy_params = p
        self._hop = np.ones((t.n_cores + 1, t.n_cores + 1))
        self._hop[:-1, :-1] = t.hop_matrix
        self._hop_latency = t.hop_latency_cycles
        local = {c: i for i, c in enumerate(self.clusters)}
        where = clustering.cluster_of
        apps = sorted({a for c in self.clusters for a, _ in clustering.clusters[c]})

        volume = np.zeros((self.k, self.k))
        intra = 0.0
        schedules = []
        for a in apps:
            g = w.applications[a]
            order = g.topo_order()
            pos = {v: i for i, v in enumerate(order)}
            cl = {task.id: local[where[(a, task.id)]] for task in g.tasks}
            preds: list[list] = [[] for _ in order]
            for e in g.edges:
                cu, cv = cl[e.src], cl[e.dst]
                preds[pos[e.dst]].append((pos[e.src], cu == cv, e.volume_bits / t.link_bandwidth_bits_per_cycle))
                if cu == cv:
                    intra += e.volume_bits * p.e_router_bit
                else:
                    volume[min(cu, cv), max(cu, cv)] += e.volume_bits
            schedules.append(
                _AppSchedule([cl[v] for v in order], [float(g.by_id[v].compute_cycles) for v in order], preds)
            )
        self._apps = schedules
        self._intra = intra
        self.pairs = [(i, j, volume[i, j]) for i in range(self.k) for j in range(i + 1, self.k) if volume[i, j] > 0]
        self.volume = volume + volume.T

    def raw(self, pos: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Energy and summed makespan for each placement row."""
        pos = np.atleast_2d(np.asarray(pos, dtype=np.int64))
        b = pos.shape[0]
        er, el = self.energy_params.e_router_bit, self.energy_params.e_link_bit
        hop = self._hop
        energy = np.full(b, self._intra)
        for i, j, vol in self.pairs:
            h = hop[pos[:, i], pos[:, j]]
            energy += vol * ((h + 1.0) * er + h * el)
        span = np.zeros(b)
        lat = self._hop_latency
        for app in self._apps:
            free = np.zeros((b, self.k))
            finish = np.empty((b, len(app.cluster)))
            for v, (c, work, preds) in enumerate(zip(app.cluster, app.compute, app.preds)):
                start = free[:, c]
                for u, same, vb in preds:
                    if same:
                        ready = finish[:, u]
                    else:
                        ready = finish[:, u] + (hop[pos[:, app.cluster[u]], pos[:, c]] * lat + vb)
                    start = np.maximum(start, ready)
                finish[:, v] = start + work
                free[:, c] = finish[:, v]
            if len(app.cluster):
                span += finish.max(axis=1)
        return energy, span

    def incremental_energy(self, c: int, core: int, placed: np.ndarray) -> np.ndarray:
        """Energy of edges between cluster ``c`` on ``core`` and the placed clusters, per candidate core."""
        er, el = self.energy_params.e_router_bit, self.energy_params.e_link_bit
        mask = placed >= 0
        if not mask.any():
            return np.zeros_like(np.atleast_1d(core), dtype=float)
        vols = self.volume[c, mask]
        h = self._hop[np.atleast_1d(core)[:, None], placed[mask][None, :]]
        return (vols[None, :] * ((h + 1.0) * er + h * el)).sum(axis=1)


class MappingProblem:
    """Workload + clustering + mesh + cost weights, ready for optimization."""

    def __init__(self, w: Workload, clustering: Clustering, t: Topology, energy: EnergyParams | None = None, cost: CostParams | None = None):
        self.workload = w
        self.clustering = clustering
        self.topology = t
        self.energy_params = energy or EnergyParams()
        self.cost_params = cost
        bad = clustering.check_partition(w)
        if bad:
            raise InvalidArgument("clustering is not a partition: " + "; ".join(bad))
        groups = conflict_groups(w, clustering)
        for g in groups:
            if len(g) > t.n_cores:
                raise InfeasibleError(f"{len(g)} clusters cannot be placed injectively on {t.n_cores} cores")
        self.components = [Component(g, w, clustering, t, self.energy_params) for g in groups]

    @property
    def n_cores(self) -> int:
        return self.topology.n_cores

    @property
    def n_clusters(self) -> int:
        return len(self.clustering)

    def with_cost(self, cost: CostParams) -> "MappingProblem":
        other = object.__new__(MappingProblem)
        other.__dict__.update(self.__dict__)
        other.cost_params = cost
        return other

    def _cp(self) -> CostParams:
        if self.cost_params is None:
            raise ValueError("problem has no CostParams; calibrate first")
        return self.cost_params

    def combine(self, energy, span):
        cp = self._cp()
        return cp.alpha * span / cp.max_cost_perf + (1.0 - cp.alpha) * energy / cp.max_cost_ener

    def fitness(self, comp: int, pos: np.ndarray) -> np.ndarray:
        """Normalized cost contribution of component ``comp`` for each row."""
        e, s = self.components[comp].raw(pos)
        return self.combine(e, s)

    def breakdown(self, placements: list[np.ndarray]) -> CostBreakdown:
        energy = 0.0
        span = 0.0
        for comp, pos in zip(self.components, placements):
            e, s = comp.raw(np.asarray(pos)[None, :])
            energy += float(e[0])
            span += float(s[0])
        return CostBreakdown(energy, span, float(self.combine(energy, span)))

    def to_mapping(self, placements: list[np.ndarray]) -> Mapping:
        assignment = {}
        for comp, pos in zip(self.components, placements):
            for c, core in zip(comp.clusters, np.asarray(pos)[: comp.k]):
                assignment[c] = self.topology.coord(int(core))
        return Mapping(dict(sorted(assignment.items())), self.breakdown(placements))

    def placements_of(self, m: Mapping) -> list[np.ndarray]:
        return [np.array([self.topology.index(tuple(m.assignment[c])) for c in comp.clusters]) for comp in self.components]


def sample_raw(problem: MappingProblem, seed: int, n_samples: int) -> tuple[np.ndarray, np.ndarray]:
    """Energy/makespan of ``n_samples`` uniform random valid mappings."""
    rng = np.random.default_rng([int(seed), 0xCA1B])
    n = problem.n_cores
    energy = np.zeros(n_samples)
    span = np.zeros(n_samples)
    draws = [np.array([rng.permutation(n)[: c.k] for _ in range(n_samples)]) for c in problem.components]
    for comp, pos in zip(problem.components, draws):
        e, s = comp.raw(pos)
        energy += e
        span += s
    return energy, span


def calibrate_normalizers(
    w: Workload,
    clustering: Clustering,
    t: Topology,
    p: EnergyParams | None = None,
    seed: int = 0,
    n_samples: int = 100,
    alpha: float = 0.5,
) -> CostParams:
    """Normalizers = maxima of energy and makespan over seeded random mappings.

    A zero maximum (e.g. a workload without edges has zero energy for every
    mapping) is replaced by 1 so the normalized term stays 0.
    """
    if n_samples < 1:
        raise InvalidArgument("n_samples must be >= 1")
    problem = MappingProblem(w, clustering, t, p)
    energy, span = sample_raw(problem, seed, n_samples)
    max_e = float(energy.max()) or 1.0
    max_s = float(span.max()) or 1.0
    return CostParams(alpha, max_s, max_e)


def build_problem(w, clustering, t, energy=None, alpha=0.5, calib_samples=100, calib_seed=0) -> MappingProblem:
    problem = MappingProblem(w, clustering, t, energy)
    cp = calibrate_normalizers(w, clustering, t, problem.energy_params, calib_seed, calib_samples, alpha)
    return problem.with_cost(cp)


def random_clustering(w: Workload, n_clusters: int, seed: int) -> Clustering:
    """Seeded random partition of all tasks into ``n_clusters`` nonempty parts."""
    keys = w.keys()
    if not 1 <= n_clusters <= len(keys):
        raise InvalidArgument("n_clusters must be between 1 and the number of tasks")
    rng = np.random.default_rng([int(seed), 0xC1])
    order = rng.permutation(len(keys))
    parts = [[] for _ in range(n_clusters)]
    for i, idx in enumerate(order):
        parts[i % n_clusters].append(keys[idx])
    return Clustering.from_groups(parts)


def random_instance(
    n_clusters: int,
    rows: int,
    cols: int,
    seed: int,
    alpha: float = 0.5,
    tasks_per_cluster: int = 2,
    energy: EnergyParams | None = None,
) -> MappingProblem:
    """Small single-application instance used by oracle comparisons."""
    from .model import generate_mesh

    cfg = GeneratorConfig(groups=3, cross_edge_prob=0.5, signal_length=8)
    w = generate_workload(1, n_clusters * tasks_per_cluster, seed, cfg)
    clustering = random_clustering(w, n_clusters, seed)
    return build_problem(w, clustering, generate_mesh(rows, cols), energy, alpha, 100, seed)


def replace_cost(problem: MappingProblem, **changes) -> MappingProblem:
    return problem.with_cost(replace(problem._cp(), **changes))
