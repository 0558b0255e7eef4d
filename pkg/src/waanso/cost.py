"""Reference cost model: bit energy, list-scheduling makespan, unified cost.

These are the plain, per-edge/per-task definitions.  The optimizers use the
batched evaluator in :mod:`waanso.problem`, which is checked against these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidArgument
from .model import Clustering, Coord, Mapping, Topology, Workload, validate_mapping


@dataclass(frozen=True)
class EnergyParams:
    e_router_bit: float = 1.0
    e_link_bit: float = 0.5

    def __post_init__(self):
        for v in (self.e_router_bit, self.e_link_bit):
            if not (math.isfinite(v) and v > 0):
                raise InvalidArgument("bit energies must be finite and > 0")


@dataclass(frozen=True)
class CostParams:
    alpha: float
    max_cost_perf: float
    max_cost_ener: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidArgument(f"alpha must lie in [0, 1], got {self.alpha}")
        if not (self.max_cost_perf > 0 and self.max_cost_ener > 0):
            raise InvalidArgument("normalizers must be > 0")


@dataclass(frozen=True)
class CostBreakdown:
    energy: float
    makespan_cycles: float
    total: float

    def as_dict(self) -> dict:
        return {"energy": self.energy, "makespan": self.makespan_cycles, "total": self.total}


def edge_energy(volume_bits: int, src_core: Coord, dst_core: Coord, p: EnergyParams, topology: Topology | None = None) -> float:
    """Energy of one message: every bit crosses hops+1 routers and hops links."""
    if topology is not None:
        hops = topology.hop_distance(src_core, dst_core)
    else:
        hops = abs(src_core[0] - dst_core[0]) + abs(src_core[1] - dst_core[1])
    return volume_bits * ((hops + 1) * p.e_router_bit + hops * p.e_link_bit)


def _require_valid(w, clustering, m, t):
    bad = validate_mapping(m, clustering, t, w)
    if bad:
        raise InvalidArgument("invalid mapping: " + "; ".join(bad))


def total_energy(w: Workload, clustering: Clustering, m: Mapping, p: EnergyParams, t: Topology | None = None) -> float:
    if t is not None:
        _require_valid(w, clustering, m, t)
    where = clustering.cluster_of
    total = 0.0
    for a, g in enumerate(w.applications):
        for e in g.edges:
            cu, cv = where[(a, e.src)], where[(a, e.dst)]
            if cu == cv:
                total += e.volume_bits * p.e_router_bit
            else:
                total += edge_energy(e.volume_bits, m.assignment[cu], m.assignment[cv], p)
    return total


def app_makespans(w: Workload, clustering: Clustering, m: Mapping, t: Topology) -> list[float]:
    """Per-application list-scheduling finish time (applications run in isolation)."""
    where = clustering.cluster_of
    out = []
    for a, g in enumerate(w.applications):
        preds: dict[int, list] = {task.id: [] for task in g.tasks}
        for e in g.edges:
            preds[e.dst].append((e.src, e.volume_bits))
        core = {task.id: tuple(m.assignment[where[(a, task.id)]]) for task in g.tasks}
        free: dict[Coord, float] = {}
        finish: dict[int, float] = {}
        for v in g.topo_order():
            start = free.get(core[v], 0.0)
            for u, vol in preds[v]:
                ready = finish[u]
                if core[u] != core[v]:
                    hops = t.hop_distance(core[u], core[v])
                    ready += hops * t.hop_latency_cycles + vol / t.link_bandwidth_bits_per_cycle
                start = max(start, ready)
            finish[v] = start + g.by_id[v].compute_cycles
            free[core[v]] = finish[v]
        out.append(max(finish.values(), default=0.0))
    return out


def makespan(w: Workload, clustering: Clustering, m: Mapping, t: Topology) -> float:
    """Sum over applications of their scheduled completion time."""
    _require_valid(w, clustering, m, t)
    return float(sum(app_makespans(w, clustering, m, t)))


def total_cost(energy: float, perf: float, cp: CostParams) -> float:
    if not (math.isfinite(energy) and math.isfinite(perf)):
        raise InvalidArgument("energy and performance must be finite")
    return cp.alpha * perf / cp.max_cost_perf + (1.0 - cp.alpha) * energy / cp.max_cost_ener


def evaluate_mapping(w, clustering, m, t, p: EnergyParams, cp: CostParams) -> CostBreakdown:
    e = total_energy(w, clustering, m, p, t)
    ms = makespan(w, clustering, m, t)
    return CostBreakdown(e, ms, total_cost(e, ms, cp))
