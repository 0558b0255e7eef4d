"""Workloads, mesh topologies, clusterings and mappings.

Tasks are addressed across the whole workload by a ``TaskKey``, the pair
``(application index, task id)``; ids only need to be unique inside their
own application.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import (
    CycleError,
    DanglingEndpointError,
    DuplicateIdError,
    InvalidArgument,
    SignalLengthError,
    WorkloadError,
    WorkloadParseError,
)

TaskKey = tuple[int, int]
Coord = tuple[int, int]

SCHEMA = "workload.v1"


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Task:
    id: int
    compute_cycles: int
    signal: tuple[float, ...]

    def __post_init__(self):
        if self.compute_cycles < 0:
            raise InvalidArgument(f"task {self.id}: compute_cycles must be >= 0")
        if len(self.signal) < 2 or not _is_pow2(len(self.signal)):
            raise SignalLengthError(
                f"task {self.id}: signal length {len(self.signal)} is not a power of two >= 2"
            )
        if not all(math.isfinite(v) for v in self.signal):
            raise InvalidArgument(f"task {self.id}: signal has non-finite values")


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    volume_bits: int


@dataclass(frozen=True)
class TaskGraph:
    """One application: tasks plus directed, volume-weighted edges (a DAG)."""

    name: str
    tasks: tuple[Task, ...]
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        ids = [t.id for t in self.tasks]
        seen = set()
        for i in ids:
            if i in seen:
                raise DuplicateIdError(f"application {self.name!r}: duplicate task id {i}")
            seen.add(i)
        for e in self.edges:
            if e.src not in seen or e.dst not in seen:
                raise DanglingEndpointError(
                    f"application {self.name!r}: edge {e.src}->{e.dst} references an unknown task"
                )
            if e.src == e.dst:
                raise InvalidArgument(f"application {self.name!r}: self-loop on task {e.src}")
            if e.volume_bits <= 0:
                raise InvalidArgument(f"application {self.name!r}: edge volume must be positive")
        self.topo_order()

    @cached_property
    def by_id(self) -> dict[int, Task]:
        return {t.id: t for t in self.tasks}

    def topo_order(self) -> list[int]:
        """Kahn order, ready tasks taken by ascending id."""
        indeg = {t.id: 0 for t in self.tasks}
        succ: dict[int, list[int]] = {t.id: [] for t in self.tasks}
        for e in self.edges:
            indeg[e.dst] += 1
            succ[e.src].append(e.dst)
        ready = [i for i, d in indeg.items() if d == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            u = heapq.heappop(ready)
            order.append(u)
            for v in succ[u]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    heapq.heappush(ready, v)
        if len(order) != len(self.tasks):
            raise CycleError(f"application {self.name!r}: task graph contains a cycle")
        return order


@dataclass(frozen=True)
class Workload:
    applications: tuple[TaskGraph, ...]

    def __post_init__(self):
        if len(self.applications) < 1:
            raise InvalidArgument("a workload needs at least one application")
        names = [a.name for a in self.applications]
        if len(set(names)) != len(names):
            raise DuplicateIdError("application names must be unique")

    def keys(self) -> list[TaskKey]:
        return [(a, t.id) for a, g in enumerate(self.applications) for t in g.tasks]

    def task(self, key: TaskKey) -> Task:
        return self.applications[key[0]].by_id[key[1]]

    def items(self) -> Iterator[tuple[TaskKey, Task]]:
        for a, g in enumerate(self.applications):
            for t in g.tasks:
                yield (a, t.id), t

    @property
    def n_tasks(self) -> int:
        return sum(len(g.tasks) for g in self.applications)


@dataclass(frozen=True)
class Topology:
    """Homogeneous 2-D mesh with XY routing."""

    rows: int
    cols: int
    link_bandwidth_bits_per_cycle: float = 32.0
    hop_latency_cycles: float = 1.0

    @property
    def n_cores(self) -> int:
        return self.rows * self.cols

    @property
    def routers(self) -> list[Coord]:
        return [(r, c) for r in range(self.rows) for c in range(self.cols)]

    @property
    def links(self) -> list[tuple[Coord, Coord]]:
        out = []
        for r in range(self.rows):
            for c in range(self.cols):
                if c + 1 < self.cols:
                    out.append(((r, c), (r, c + 1)))
                if r + 1 < self.rows:
                    out.append(((r, c), (r + 1, c)))
        return out

    def contains(self, a: Coord) -> bool:
        return 0 <= a[0] < self.rows and 0 <= a[1] < self.cols

    def index(self, a: Coord) -> int:
        if not self.contains(a):
            raise InvalidArgument(f"core {a} is outside the {self.rows}x{self.cols} mesh")
        return a[0] * self.cols + a[1]

    def coord(self, i: int) -> Coord:
        if not 0 <= i < self.n_cores:
            raise InvalidArgument(f"core index {i} out of range")
        return divmod(int(i), self.cols)

    def hop_distance(self, a: Coord, b: Coord) -> int:
        self.index(a)
        self.index(b)
        return abs(a[0] - b[0]) + abs(a[1] - b[1])

    @cached_property
    def hop_matrix(self) -> np.ndarray:
        rc = np.array(self.routers).reshape(-1, 2)
        h = np.abs(rc[:, None, :] - rc[None, :, :]).sum(axis=2)
        h.setflags(write=False)
        return h


def generate_mesh(rows: int, cols: int, bandwidth: float = 32.0, hop_latency: float = 1.0) -> Topology:
    if rows < 1 or cols < 1:
        raise InvalidArgument(f"mesh dimensions must be positive, got {rows}x{cols}")
    if not (bandwidth > 0 and math.isfinite(bandwidth)):
        raise InvalidArgument("bandwidth must be positive")
    if not (hop_latency > 0 and math.isfinite(hop_latency)):
        raise InvalidArgument("hop latency must be positive")
    return Topology(rows, cols, float(bandwidth), float(hop_latency))


def parse_topology(spec: str, bandwidth: float = 32.0, hop_latency: float = 1.0) -> Topology:
    """Parse ``"RxC"`` into a mesh."""
    try:
        r, c = (int(v) for v in spec.lower().split("x"))
    except ValueError:
        raise InvalidArgument(f"topology must look like '8x8', got {spec!r}") from None
    return generate_mesh(r, c, bandwidth, hop_latency)


def hop_distance(a: Coord, b: Coord, topology: Topology) -> int:
    """XY-routing hop count (Manhattan distance) between two cores."""
    return topology.hop_distance(a, b)


# -- clusterings ---------------------------------------------------------------


@dataclass(frozen=True)
class ClusterQuality:
    entropies: tuple[float, ...]
    weighted_diversity: float
    f_cost: float
    cost_perf: float


@dataclass(frozen=True)
class Clustering:
    """A partition of workload tasks; clusters sorted by their smallest key."""

    clusters: tuple[tuple[TaskKey, ...], ...]
    resolution: int | None = None
    quality: ClusterQuality | None = None

    @classmethod
    def from_groups(cls, groups: Iterable[Iterable[TaskKey]], resolution=None, quality=None) -> "Clustering":
        parts = [tuple(sorted(tuple(k) for k in g)) for g in groups]
        parts = sorted((p for p in parts if p), key=lambda p: p[0])
        return cls(tuple(parts), resolution, quality)

    def __len__(self) -> int:
        return len(self.clusters)

    @cached_property
    def cluster_of(self) -> dict[TaskKey, int]:
        return {k: i for i, members in enumerate(self.clusters) for k in members}

    def check_partition(self, w: Workload) -> list[str]:
        problems = []
        seen: set[TaskKey] = set()
        for i, members in enumerate(self.clusters):
            if not members:
                problems.append(f"cluster {i} is empty")
            for k in members:
                if k in seen:
                    problems.append(f"task {k} appears in more than one cluster")
                seen.add(k)
        keys = set(w.keys())
        if seen - keys:
            problems.append(f"unknown tasks {sorted(seen - keys)[:5]}")
        if keys - seen:
            problems.append(f"uncovered tasks {sorted(keys - seen)[:5]}")
        return problems


def conflict_groups(w: Workload, clustering: Clustering) -> list[list[int]]:
    """Group clusters that must sit on distinct cores.

    Applications are scheduled independently of one another, so two clusters
    only compete for a core when they hold tasks of a common application.
    Returns the connected components of that relation, each sorted, ordered
    by smallest cluster index.
    """
    n = len(clustering)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    first_of_app: dict[int, int] = {}
    for i, members in enumerate(clustering.clusters):
        for app, _ in members:
            if app in first_of_app:
                a, b = find(first_of_app[app]), find(i)
                if a != b:
                    parent[max(a, b)] = min(a, b)
            else:
                first_of_app[app] = i
    comps: dict[int, list[int]] = {}
    for i in range(n):
        comps.setdefault(find(i), []).append(i)
    return sorted(comps.values(), key=lambda c: c[0])


# -- mappings ------------------------------------------------------------------


@dataclass(frozen=True)
class Mapping:
    assignment: dict[int, Coord]
    cost: "object | None" = field(default=None, compare=False)


def validate_mapping(m: Mapping, clustering: Clustering, t: Topology, w: Workload | None = None) -> list[str]:
    """List violated mapping invariants; an empty list means valid.

    Without a workload every pair of clusters is treated as conflicting,
    i.e. the assignment must be globally injective.
    """
    violations = []
    n = len(clustering)
    for c in range(n):
        if c not in m.assignment:
            violations.append(f"cluster {c} is not assigned")
    for c, core in sorted(m.assignment.items()):
        if not 0 <= c < n:
            violations.append(f"assignment for unknown cluster {c}")
        if not t.contains(tuple(core)):
            violations.append(f"cluster {c} assigned to {tuple(core)} outside the {t.rows}x{t.cols} mesh")
    groups = conflict_groups(w, clustering) if w is not None else [list(range(n))]
    for g in groups:
        used: dict[Coord, int] = {}
        for c in g:
            if c not in m.assignment:
                continue
            core = tuple(m.assignment[c])
            if core in used:
                violations.append(f"clusters {used[core]} and {c} share core {core}")
            else:
                used[core] = c
    return violations


# -- workload I/O --------------------------------------------------------------


def workload_to_dict(w: Workload) -> dict:
    return {
        "schema": SCHEMA,
        "applications": [
            {
                "name": g.name,
                "tasks": [
                    {"id": t.id, "compute_cycles": t.compute_cycles, "signal": list(t.signal)} for t in g.tasks
                ],
                "edges": [{"src": e.src, "dst": e.dst, "volume_bits": e.volume_bits} for e in g.edges],
            }
            for g in w.applications
        ],
    }


def workload_from_dict(d: dict) -> Workload:
    try:
        apps = []
        for a in d["applications"]:
            tasks = tuple(
                Task(int(t["id"]), int(t["compute_cycles"]), tuple(float(v) for v in t["signal"])) for t in a["tasks"]
            )
            edges = tuple(Edge(int(e["src"]), int(e["dst"]), int(e["volume_bits"])) for e in a.get("edges", []))
            apps.append(TaskGraph(str(a["name"]), tasks, edges))
    except WorkloadError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidArgument):
            raise
        raise WorkloadParseError(f"workload does not match {SCHEMA}: {exc!r}") from exc
    return Workload(tuple(apps))


def dumps_workload(w: Workload) -> str:
    return json.dumps(workload_to_dict(w), separators=(",", ":"))


def save_workload(w: Workload, path) -> None:
    Path(path).write_text(dumps_workload(w))


def load_workload(path) -> Workload:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise WorkloadParseError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(d, dict) or "applications" not in d:
        raise WorkloadParseError(f"{path}: missing 'applications'")
    return workload_from_dict(d)


# -- synthetic workloads -------------------------------------------------------


@dataclass(frozen=True)
class GeneratorConfig:
    """Knobs for :func:`generate_workload`.

    Tasks are laid out as a grid of ``layers x groups``: task ``i`` belongs to
    latent group ``i % groups`` and layer ``i // groups``.  Edges only run
    from one layer to the next.  A group behaves like a pipeline lane: edges
    inside a lane are likely and heavy, edges across lanes sparse.  Every
    group has one base waveform, shared by all applications, with a fixed
    share of its energy in the coarsest approximation band; task signals are
    that waveform plus white noise.
    """

    groups: int = 4
    signal_length: int = 64
    signal_levels: int = 2
    noise: float = 0.02
    compute_min: int = 50
    compute_max: int = 150
    volume_min: int = 256
    volume_max: int = 2048
    intra_edge_prob: float = 0.9
    cross_edge_prob: float = 0.15
    intra_volume_scale: float = 4.0


def latent_group(task_id: int, groups: int) -> int:
    return task_id % groups


def _group_bases(rng: np.random.Generator, cfg: GeneratorConfig) -> list[np.ndarray]:
    from .wavelet import CoeffPyramid, idwt

    n, lv = cfg.signal_length, cfg.signal_levels
    sizes = [n >> j for j in range(lv + 1)]
    bases = []
    for g in range(cfg.groups):
        share = (g + 0.5) / cfg.groups
        zeros = [np.zeros(s) for s in sizes]
        low = idwt(CoeffPyramid(tuple(zeros[:-1]) + (rng.standard_normal(sizes[-1]),), tuple(zeros[1:])))
        high = idwt(CoeffPyramid(tuple(zeros), tuple(rng.standard_normal(s) for s in sizes[1:])))
        low /= np.linalg.norm(low)
        high /= np.linalg.norm(high)
        base = np.sqrt(share) * low + np.sqrt(1.0 - share) * high
        bases.append(base * np.sqrt(n))
    return bases


def generate_workload(n_apps: int, tasks_per_app: int, seed: int, params: GeneratorConfig | None = None) -> Workload:
    """Seeded layered-DAG workload with group-correlated task signals."""
    cfg = params or GeneratorConfig()
    if n_apps < 1 or tasks_per_app < 1:
        raise InvalidArgument("need at least one application and one task per application")
    if cfg.groups < 1:
        raise InvalidArgument("groups must be >= 1")
    if not _is_pow2(cfg.signal_length) or cfg.signal_length < 2 or 2**cfg.signal_levels > cfg.signal_length:
        raise InvalidArgument("signal_length must be a power of two >= 2**signal_levels")
    seed = int(seed)
    bases = _group_bases(np.random.default_rng([seed, 0]), cfg)
    apps = []
    for a in range(n_apps):
        rng = np.random.default_rng([seed, 1, a])
        tasks = []
        for i in range(tasks_per_app):
            g = latent_group(i, cfg.groups)
            sig = bases[g] + cfg.noise * rng.standard_normal(cfg.signal_length)
            cycles = int(rng.integers(cfg.compute_min, cfg.compute_max + 1))
            tasks.append(Task(i, cycles, tuple(float(v) for v in sig)))
        edges = []
        for u in range(tasks_per_app):
            lu = u // cfg.groups
            for v in range((lu + 1) * cfg.groups, min((lu + 2) * cfg.groups, tasks_per_app)):
                same = latent_group(u, cfg.groups) == latent_group(v, cfg.groups)
                p = cfg.intra_edge_prob if same else cfg.cross_edge_prob
                if rng.random() < p:
                    vol = int(rng.integers(cfg.volume_min, cfg.volume_max + 1))
                    if same:
                        vol = int(round(vol * cfg.intra_volume_scale))
                    edges.append(Edge(u, v, vol))
        apps.append(TaskGraph(f"app{a}", tuple(tasks), tuple(edges)))
    return Workload(tuple(apps))
