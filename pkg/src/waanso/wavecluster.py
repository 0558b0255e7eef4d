"""Grid-based wavelet clustering of tasks by their behaviour signals.

Pipeline per grid resolution: embed every task as a 2-D feature point,
quantize into a density grid, keep the cells the 2-D wavelet approximation
marks as significant, label 4-connected components, then merge neighbouring
components whose link strength (summed relative wavelet entropy across the
facing cells) reaches an adaptively tuned threshold.  A sweep over
resolutions keeps refining the grid until the entropy-based cluster score
saturates.

Components are 4-connected, so two different components can only touch
diagonally.  Neighbouring components are therefore those with cells at
Chebyshev distance one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateInput, InvalidArgument
from .model import Clustering, ClusterQuality, TaskKey, Workload
from .wavelet import CoeffDistribution, CoeffPyramid, coeff_distribution, dwt, dwt2_approx, rwe, wavelet_variance

Cell = tuple[int, int]

F_COST_FLOOR = 1e-9
MAX_RESOLUTION = 64


@dataclass(frozen=True)
class FeaturePoint:
    key: TaskKey
    coords: tuple[float, float]


@dataclass(frozen=True)
class DensityGrid:
    resolution: int
    counts: np.ndarray
    members: dict[Cell, tuple[TaskKey, ...]]
    cell_of: dict[TaskKey, Cell]


@dataclass(frozen=True)
class ThresholdState:
    s_exp: float | None = None
    omega: float = 1.0
    mu: float = 0.5
    gamma: float = 0.0
    history: tuple[float, ...] = ()


# -- features ------------------------------------------------------------------


def task_pyramids(w: Workload, wavelet="haar", levels: int = 2) -> dict[TaskKey, CoeffPyramid]:
    return {key: dwt(task.signal, wavelet, levels) for key, task in w.items()}


def raw_features(pyramids: dict[TaskKey, CoeffPyramid]) -> dict[TaskKey, tuple[float, float]]:
    """(approximation share, detail share) of each task's signal energy."""
    out = {}
    for key, p in pyramids.items():
        total = p.total_energy()
        if total <= 0.0:
            raise DegenerateInput(f"task {key} has an all-zero signal")
        out[key] = (p.approx_energy() / total, p.detail_energy() / total)
    return out


def _rescale(values: np.ndarray) -> np.ndarray:
    lo, hi = values.min(), values.max()
    if hi - lo <= 1e-12:
        return np.full_like(values, 0.5)
    return np.clip((values - lo) / (hi - lo), 0.0, 1.0)


def task_features(w: Workload, wavelet="haar", levels: int = 2, pyramids=None) -> list[FeaturePoint]:
    pyramids = pyramids or task_pyramids(w, wavelet, levels)
    raw = raw_features(pyramids)
    keys = sorted(raw)
    arr = np.array([raw[k] for k in keys], dtype=float).reshape(len(keys), 2)
    scaled = np.column_stack([_rescale(arr[:, 0]), _rescale(arr[:, 1])])
    return [FeaturePoint(k, (float(x), float(y))) for k, (x, y) in zip(keys, scaled)]


# -- grid steps ----------------------------------------------------------------


def _check_resolution(r: int):
    if r < 2 or r & (r - 1):
        raise InvalidArgument(f"resolution must be a power of two >= 2, got {r}")


def quantize(points: list[FeaturePoint], resolution: int) -> DensityGrid:
    _check_resolution(resolution)
    counts = np.zeros((resolution, resolution), dtype=int)
    members: dict[Cell, list[TaskKey]] = {}
    cell_of = {}
    for p in sorted(points, key=lambda p: p.key):
        cell = tuple(min(int(math.floor(c * resolution)), resolution - 1) for c in p.coords)
        counts[cell] += 1
        members.setdefault(cell, []).append(p.key)
        cell_of[p.key] = cell
    return DensityGrid(resolution, counts, {c: tuple(m) for c, m in members.items()}, cell_of)


def significant_cells(g: DensityGrid, wavelet="haar", threshold_percentile: float = 50.0) -> set[Cell]:
    """Occupied cells whose 2x2 block has a large enough wavelet approximation."""
    approx = dwt2_approx(g.counts, wavelet)
    nonzero = approx[np.abs(approx) > 1e-12]
    if len(nonzero) == 0:
        return set()
    threshold = np.percentile(nonzero, threshold_percentile)
    block = np.repeat(np.repeat(approx, 2, axis=0), 2, axis=1)
    keep = (block >= threshold) & (g.counts > 0)
    return {(int(i), int(j)) for i, j in zip(*np.nonzero(keep))}


def label_cells(cells: set[Cell]) -> list[list[Cell]]:
    """4-connected components, ordered by their smallest cell."""
    remaining = set(cells)
    comps = []
    for start in sorted(cells):
        if start not in remaining:
            continue
        remaining.discard(start)
        comp, stack = [], [start]
        while stack:
            i, j = stack.pop()
            comp.append((i, j))
            for nb in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)):
                if nb in remaining:
                    remaining.discard(nb)
                    stack.append(nb)
        comps.append(sorted(comp))
    return comps


def _touching(a: list[Cell], b: list[Cell]) -> list[tuple[Cell, Cell]]:
    sb = set(b)
    pairs = []
    for i, j in a:
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                nb = (i + di, j + dj)
                if (di or dj) and nb in sb:
                    pairs.append(((i, j), nb))
    return pairs


def adjacent(a: list[Cell], b: list[Cell]) -> bool:
    return bool(_touching(a, b))


def link_strength(cluster_a: list[Cell], cluster_b: list[Cell], grid: DensityGrid, dists: dict[TaskKey, CoeffDistribution]) -> float:
    """Summed RWE(a|b) over task pairs in facing cells of two neighbouring clusters."""
    pairs = _touching(cluster_a, cluster_b)
    if not pairs:
        raise InvalidArgument("clusters do not touch")
    total = 0.0
    for ca, cb in pairs:
        for a in grid.members.get(ca, ()):
            for b in grid.members.get(cb, ()):
                total += sum(rwe(dists[a], dists[b]))
    return total


# -- adaptive threshold ----------------------------------------------------------


def adapt_threshold(strengths, state: ThresholdState, seed: int = 0, stream_key: int = 0, max_cycles: int = 8, tol: float = 1e-6) -> ThresholdState:
    """Self-adapting expected link strength.

    A fresh state starts at the median strength.  Each cycle moves the
    threshold by ``s <- omega * s + eps * mean``, where ``eps`` is the
    accumulated squared change of past thresholds squashed into [0, 1); the
    weight grows by ``mu * gamma * rms`` with a random learning rate
    ``gamma`` and the forgetting factor shrinks with the largest strength.
    """
    s = np.asarray(list(strengths), dtype=float)
    if len(s) == 0:
        return state
    mean, rms, peak = float(s.mean()), float(np.sqrt(np.mean(s**2))), float(s.max())
    if state.s_exp is None or not state.history:
        s0 = float(np.median(s))
        state = replace(state, s_exp=s0, history=(s0,))
    s_exp, omega, mu, gamma = state.s_exp, state.omega, state.mu, state.gamma
    history = list(state.history)
    for cycle in range(max_cycles):
        hist = np.asarray(history)
        raw = float(np.sum(np.diff(hist) ** 2))
        eps = raw / (1.0 + raw)
        s_new = omega * s_exp + eps * mean
        gamma = float(np.random.default_rng([int(seed), int(stream_key), cycle]).random())
        omega = omega + mu * gamma * rms
        mu = min(max(1.0 / (1.0 + 2.0 * peak**2), 1e-12), 1.0 - 1e-12)
        history.append(s_new)
        done = abs(s_new - s_exp) < tol
        s_exp = s_new
        if done:
            break
    return ThresholdState(s_exp, omega, mu, gamma, tuple(history))


# -- merging and scoring ------------------------------------------------------


def prune_and_merge(cell_clusters: list[list[Cell]], strengths: dict[tuple[int, int], float], s_exp: float | None, grid: DensityGrid) -> Clustering:
    """Merge neighbouring components joined by strong links; attach leftover tasks.

    ``strengths`` holds directed values keyed ``(i, j)``; a link is kept when
    the mean of both directions reaches ``s_exp``.  Tasks outside the
    significant cells join the cluster of the nearest significant cell.
    """
    all_keys = sorted(grid.cell_of)
    if not cell_clusters:
        return Clustering.from_groups([all_keys], grid.resolution)
    n = len(cell_clusters)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    if s_exp is not None:
        for (i, j), sij in sorted(strengths.items()):
            if i < j:
                sym = 0.5 * (sij + strengths.get((j, i), sij))
                if sym >= s_exp:
                    a, b = find(i), find(j)
                    parent[max(a, b)] = min(a, b)
    label_of_cell = {cell: find(i) for i, comp in enumerate(cell_clusters) for cell in comp}
    sig = sorted(label_of_cell)
    centers = np.array(sig, dtype=float) + 0.5
    groups: dict[int, list[TaskKey]] = {}
    for key in all_keys:
        cell = grid.cell_of[key]
        if cell in label_of_cell:
            lab = label_of_cell[cell]
        else:
            d = np.hypot(*(centers - (np.array(cell) + 0.5)).T)
            near = np.flatnonzero(d <= d.min() + 1e-12)
            lab = min(label_of_cell[sig[i]] for i in near)
        groups.setdefault(lab, []).append(key)
    return Clustering.from_groups(groups.values(), grid.resolution)


def cluster_entropy(members, pyramids: dict[TaskKey, CoeffPyramid]) -> float:
    energies = np.array([pyramids[k].detail_energy() for k in members], dtype=float)
    total = energies.sum()
    if total <= 0.0:
        return 0.0
    p = energies[energies > 0] / total
    return float(-np.sum(p * np.log(p)))


def f_cost(clustering: Clustering, pyramids: dict[TaskKey, CoeffPyramid]) -> ClusterQuality:
    m_d = sum(len(c) for c in clustering.clusters)
    ent = tuple(cluster_entropy(c, pyramids) for c in clustering.clusters)
    diversity = sum(len(c) / m_d * h for c, h in zip(clustering.clusters, ent))
    f = 1.0 / max(diversity, F_COST_FLOOR)
    return ClusterQuality(ent, diversity, f, f)


# -- driver --------------------------------------------------------------------


@dataclass
class ResolutionReport:
    resolution: int
    counts: list
    significant: int
    components: int
    strengths: dict
    s_exp_trajectory: list
    merged_links: list
    n_clusters: int
    f_cost: float


def cluster_at(points, pyramids, dists, resolution, wavelet, percentile, state, seed):
    grid = quantize(points, resolution)
    cells = significant_cells(grid, wavelet, percentile)
    comps = label_cells(cells)
    strengths = {}
    for i in range(len(comps)):
        for j in range(len(comps)):
            if i != j and adjacent(comps[i], comps[j]):
                strengths[(i, j)] = link_strength(comps[i], comps[j], grid, dists)
    ordered = [strengths[k] for k in sorted(strengths)]
    state = adapt_threshold(ordered, state, seed, resolution)
    s_exp = state.s_exp if strengths else None
    clustering = prune_and_merge(comps, strengths, s_exp, grid)
    quality = f_cost(clustering, pyramids)
    merged = [
        (i, j) for (i, j), v in sorted(strengths.items())
        if i < j and s_exp is not None and 0.5 * (v + strengths[(j, i)]) >= s_exp
    ]
    report = ResolutionReport(
        resolution, grid.counts.tolist(), len(cells), len(comps),
        {f"{i}-{j}": v for (i, j), v in sorted(strengths.items())},
        list(state.history), merged, len(clustering), quality.f_cost,
    )
    return replace(clustering, quality=quality), state, report


def resolution_sweep(
    w: Workload,
    wavelet="haar",
    levels: int = 2,
    sat_tol: float = 0.05,
    seed: int = 0,
    threshold_percentile: float = 50.0,
    max_resolution: int = MAX_RESOLUTION,
    diagnostics: list | None = None,
) -> Clustering:
    """Refine the grid (2, 4, 8, ...) until the cluster score saturates."""
    pyramids = task_pyramids(w, wavelet, levels)
    points = task_features(w, wavelet, levels, pyramids)
    dists = {k: coeff_distribution(p) for k, p in pyramids.items()}
    # Coincident points share one cell at every resolution: nothing to refine.
    coincident = len({p.coords for p in points}) <= 1
    state = ThresholdState()
    prev = None
    best_f = -np.inf
    r = 2
    while True:
        clustering, state, report = cluster_at(points, pyramids, dists, r, wavelet, threshold_percentile, state, seed)
        if diagnostics is not None:
            diagnostics.append(report)
        f = clustering.quality.f_cost
        best_f = max(best_f, f)
        saturated = prev is not None and abs(f - prev) < sat_tol * abs(prev)
        if saturated or coincident or r * 2 > max_resolution:
            break
        prev = f
        r *= 2
    q = clustering.quality
    return replace(clustering, quality=ClusterQuality(q.entropies, q.weighted_diversity, q.f_cost, float(best_f)))


def identity_clustering(w: Workload) -> Clustering:
    """Every task in its own cluster."""
    clustering = Clustering.from_groups([[k] for k in w.keys()])
    q = ClusterQuality(tuple(0.0 for _ in clustering.clusters), 0.0, 1.0 / F_COST_FLOOR, 1.0 / F_COST_FLOOR)
    return replace(clustering, quality=q)


def diagnostics_dict(w: Workload, reports: list[ResolutionReport], wavelet="haar", levels: int = 2) -> dict:
    pyramids = task_pyramids(w, wavelet, levels)
    return {
        "resolutions": [r.__dict__ for r in reports],
        "wavelet_variance": {f"{a}:{t}": wavelet_variance(p) for (a, t), p in sorted(pyramids.items())},
    }
