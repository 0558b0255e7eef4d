"""Benchmark suites: every (algorithm, clustering mode, seed) combination of
one workload on one mesh, with CSV, summary and plot-data reports.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from pathlib import Path

import numpy as np

from .cost import CostBreakdown, CostParams, EnergyParams
from .errors import GuardError, InfeasibleError, InvalidArgument
from .model import Clustering, GeneratorConfig, Topology, Workload, generate_mesh, generate_workload, load_workload, parse_topology
from .optimizers import ALGORITHMS, AcoParams, AsoParams, PsoParams, run_aco, run_aso, run_bnb, run_brute, run_dpso
from .problem import MappingProblem, calibrate_normalizers
from .wavecluster import identity_clustering, resolution_sweep

SUITE_SCHEMA = "suite.v1"
MODES = ("wavelet", "identity", "none")
CSV_COLUMNS = ("suite_hash", "algo", "mode", "seed", "energy", "makespan", "total", "wall_ms", "iters", "optimal")
NA = "NA"


def fmt(x: float) -> str:
    """Nine significant digits, never scientific notation."""
    return np.format_float_positional(float(x), precision=9, unique=False, fractional=False, trim="-")


# -- suites --------------------------------------------------------------------


@dataclass(frozen=True)
class AlgoSpec:
    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in ALGORITHMS:
            raise InvalidArgument(f"unknown algorithm {self.name!r}; choose from {', '.join(ALGORITHMS)}")


@dataclass(frozen=True)
class BenchSuite:
    workload: dict
    topology: dict
    algorithms: tuple[AlgoSpec, ...]
    clustering_modes: tuple[str, ...]
    seeds: tuple[int, ...]
    alpha: float = 0.5
    energy: dict = field(default_factory=dict)
    calib_samples: int = 100
    calib_seed: int = 0
    wavelet: dict = field(default_factory=dict)
    record_wall_time: bool = True

    def __post_init__(self):
        if not self.algorithms:
            raise InvalidArgument("a suite needs at least one algorithm")
        if not self.seeds:
            raise InvalidArgument("a suite needs at least one seed")
        if not self.clustering_modes:
            raise InvalidArgument("a suite needs at least one clustering mode")
        for m in self.clustering_modes:
            if m not in MODES:
                raise InvalidArgument(f"unknown clustering mode {m!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidArgument("alpha must lie in [0, 1]")
        if ("path" in self.workload) == ("generator" in self.workload):
            raise InvalidArgument("workload needs exactly one of 'path' or 'generator'")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["algorithms"] = [{"name": a.name, "params": dict(a.params)} for a in self.algorithms]
        d["clustering_modes"] = list(self.clustering_modes)
        d["seeds"] = list(self.seeds)
        return {"schema": SUITE_SCHEMA, **d}

    def config_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:12]


def suite_from_dict(d: dict, base_dir=None) -> BenchSuite:
    if d.get("schema", SUITE_SCHEMA) != SUITE_SCHEMA:
        raise InvalidArgument(f"unsupported suite schema {d.get('schema')!r}")
    known = {f.name for f in fields(BenchSuite)}
    extra = set(d) - known - {"schema"}
    if extra:
        raise InvalidArgument(f"unknown suite fields: {', '.join(sorted(extra))}")
    try:
        workload = dict(d["workload"])
        if "path" in workload and base_dir is not None:
            workload["path"] = str((Path(base_dir) / workload["path"]).resolve())
        topo = d["topology"]
        if isinstance(topo, str):
            t = parse_topology(topo)
            topo = {"rows": t.rows, "cols": t.cols}
        algos = tuple(
            AlgoSpec(a, {}) if isinstance(a, str) else AlgoSpec(a["name"], dict(a.get("params", {})))
            for a in d["algorithms"]
        )
        rest = {k: d[k] for k in known - {"workload", "topology", "algorithms", "clustering_modes", "seeds"} if k in d}
        return BenchSuite(
            workload, dict(topo), algos, tuple(d["clustering_modes"]), tuple(int(s) for s in d["seeds"]), **rest
        )
    except (KeyError, TypeError) as exc:
        raise InvalidArgument(f"malformed suite: {exc!r}") from exc


def load_suite(path) -> BenchSuite:
    """Read a suite file; the name ``reference`` selects the bundled suite."""
    if str(path) == "reference":
        text = resources.files("waanso").joinpath("suites/reference.json").read_text()
        return suite_from_dict(json.loads(text))
    p = Path(path)
    try:
        d = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"{path}: not valid JSON ({exc})") from exc
    return suite_from_dict(d, p.parent)


def suite_workload(suite: BenchSuite) -> Workload:
    spec = suite.workload
    if "path" in spec:
        return load_workload(spec["path"])
    g = dict(spec["generator"])
    apps, tasks, seed = int(g.pop("apps", 1)), int(g.pop("tasks", 16)), int(g.pop("seed", 0))
    return generate_workload(apps, tasks, seed, GeneratorConfig(**g))


def suite_topology(suite: BenchSuite) -> Topology:
    t = suite.topology
    return generate_mesh(int(t["rows"]), int(t["cols"]), float(t.get("bandwidth", 32.0)), float(t.get("hop_latency", 1.0)))


# -- running -------------------------------------------------------------------


_PSO_KEYS = {f.name for f in fields(PsoParams)}
_ASO_KEYS = {"q0", "q1", "jump_max_frac"}
_ACO_KEYS = {f.name for f in fields(AcoParams)}


def run_algorithm(problem: MappingProblem, name: str, params: dict | None = None, seed: int = 0):
    """Dispatch one optimizer by name with a flat parameter dict."""
    params = dict(params or {})
    unknown = set()
    if name in ("aso", "dpso"):
        allowed = _PSO_KEYS | (_ASO_KEYS if name == "aso" else set())
        unknown = set(params) - allowed
        pso = PsoParams(**{k: v for k, v in params.items() if k in _PSO_KEYS})
        if not unknown and name == "aso":
            aso = AsoParams(pso, **{k: v for k, v in params.items() if k in _ASO_KEYS})
            return run_aso(problem, aso, seed)
        if not unknown:
            return run_dpso(problem, pso, seed)
    elif name == "aco":
        unknown = set(params) - _ACO_KEYS
        if not unknown:
            return run_aco(problem, AcoParams(**params), seed)
    elif name == "bnb":
        unknown = set(params) - {"time_limit_ms", "node_limit"}
        if not unknown:
            return run_bnb(problem, params.get("time_limit_ms"), params.get("node_limit"))
    elif name == "brute":
        unknown = set(params)
        if not unknown:
            return run_brute(problem)
    else:
        raise InvalidArgument(f"unknown algorithm {name!r}")
    raise InvalidArgument(f"unsupported parameters for {name}: {', '.join(sorted(unknown))}")


@dataclass(frozen=True)
class BenchRow:
    algo: str
    mode: str
    seed: int
    breakdown: CostBreakdown | None
    wall_ms: float | None
    iterations: int | None
    optimal: bool | None
    error: str | None = None


@dataclass
class BenchResult:
    suite_hash: str
    rows: list[BenchRow]
    normalizers: dict[str, CostParams] = field(default_factory=dict)
    clusterings: dict[str, Clustering] = field(default_factory=dict)
    errors: dict[str, str] = field(default_factory=dict)


def _threads() -> int:
    raw = os.environ.get("WAANSO_THREADS")
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise InvalidArgument(f"WAANSO_THREADS must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise InvalidArgument(f"WAANSO_THREADS must be a positive integer, got {raw!r}")
    return n


def _clustering_for(mode: str, w: Workload, t: Topology, suite: BenchSuite) -> Clustering:
    if mode == "wavelet":
        wv = suite.wavelet
        return resolution_sweep(
            w, wv.get("name", "haar"), int(wv.get("levels", 2)), float(wv.get("sat_tol", 0.05)), int(wv.get("seed", 0))
        )
    if mode == "none" and w.n_tasks > t.n_cores:
        raise InfeasibleError(f"{w.n_tasks} tasks cannot each take one of {t.n_cores} cores")
    return identity_clustering(w)


def run_bench(suite: BenchSuite) -> BenchResult:
    """Run every combination; infeasible ones become error rows."""
    w = suite_workload(suite)
    t = suite_topology(suite)
    energy = EnergyParams(**suite.energy)
    result = BenchResult(suite.config_hash(), [])
    problems: dict[str, MappingProblem] = {}
    for mode in suite.clustering_modes:
        try:
            clustering = _clustering_for(mode, w, t, suite)
            result.clusterings[mode] = clustering
            cp = calibrate_normalizers(w, clustering, t, energy, suite.calib_seed, suite.calib_samples, suite.alpha)
            problems[mode] = MappingProblem(w, clustering, t, energy, cp)
            result.normalizers[mode] = cp
        except (InfeasibleError, GuardError) as exc:
            result.errors[mode] = str(exc)

    combos = [(a, m, s) for a in suite.algorithms for m in suite.clustering_modes for s in suite.seeds]

    def one(combo) -> BenchRow:
        algo, mode, seed = combo
        if mode not in problems:
            return BenchRow(algo.name, mode, seed, None, None, None, None, result.errors[mode])
        start = time.perf_counter()
        try:
            r = run_algorithm(problems[mode], algo.name, algo.params, seed)
        except (InfeasibleError, GuardError) as exc:
            return BenchRow(algo.name, mode, seed, None, None, None, None, str(exc))
        wall = (time.perf_counter() - start) * 1000.0 if suite.record_wall_time else None
        return BenchRow(algo.name, mode, seed, r.cost, wall, r.iterations, r.optimal)

    workers = min(_threads(), max(1, len(combos)))
    if workers == 1:
        result.rows = [one(c) for c in combos]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            result.rows = list(pool.map(one, combos))
    return result


# -- reports -------------------------------------------------------------------


def csv_text(r: BenchResult) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(CSV_COLUMNS)
    for row in r.rows:
        if row.breakdown is None:
            out.writerow([r.suite_hash, row.algo, row.mode, row.seed, NA, NA, NA, NA, NA, "infeasible"])
            continue
        b = row.breakdown
        optimal = NA if row.optimal is None else str(row.optimal).lower()
        wall = NA if row.wall_ms is None else fmt(row.wall_ms)
        out.writerow([r.suite_hash, row.algo, row.mode, row.seed, fmt(b.energy), fmt(b.makespan_cycles), fmt(b.total), wall, row.iterations, optimal])
    return buf.getvalue()


def summary_table(r: BenchResult) -> list[dict]:
    """Median total, energy and makespan per (algorithm, mode), in row order."""
    groups: dict[tuple[str, str], list[CostBreakdown]] = {}
    for row in r.rows:
        groups.setdefault((row.algo, row.mode), [])
        if row.breakdown is not None:
            groups[(row.algo, row.mode)].append(row.breakdown)
    table = []
    for (algo, mode), bs in groups.items():
        med = lambda xs: float(np.median(xs)) if xs else None
        table.append({
            "algo": algo,
            "mode": mode,
            "runs": len(bs),
            "total": med([b.total for b in bs]),
            "energy": med([b.energy for b in bs]),
            "makespan": med([b.makespan_cycles for b in bs]),
        })
    return table


def summary_text(r: BenchResult) -> str:
    table = summary_table(r)
    cols = ("total", "energy", "makespan")
    best = {c: min((e[c] for e in table if e[c] is not None), default=None) for c in cols}
    lines = [f"suite {r.suite_hash}", f"{'algo':<8}{'mode':<10}{'runs':>5}" + "".join(f"{c:>18}" for c in cols)]
    for e in table:
        cells = []
        for c in cols:
            if e[c] is None:
                cells.append(f"{NA:>18}")
            else:
                mark = "*" if e[c] == best[c] else " "
                cells.append(f"{fmt(e[c]) + mark:>18}")
        lines.append(f"{e['algo']:<8}{e['mode']:<10}{e['runs']:>5}" + "".join(cells))
    lines.append("* best median in column")
    lines.append("normalizers (alpha, max makespan, max energy):")
    for mode, cp in r.normalizers.items():
        lines.append(f"  {mode}: {fmt(cp.alpha)} {fmt(cp.max_cost_perf)} {fmt(cp.max_cost_ener)}")
    for mode, msg in r.errors.items():
        lines.append(f"  {mode}: infeasible ({msg})")
    return "\n".join(lines) + "\n"


def plot_data_text(r: BenchResult) -> str:
    lines = ["# label median_energy median_makespan"]
    for e in summary_table(r):
        if e["energy"] is not None:
            lines.append(f"{e['algo']}/{e['mode']} {fmt(e['energy'])} {fmt(e['makespan'])}")
    return "\n".join(lines) + "\n"


_FORMATS = {"csv": csv_text, "summary": summary_text, "plot-data": plot_data_text}


def emit_report(r: BenchResult, fmt_name: str, path) -> Path:
    if fmt_name not in _FORMATS:
        raise InvalidArgument(f"unknown report format {fmt_name!r}")
    p = Path(path)
    with open(p, "w", newline="") as fh:
        fh.write(_FORMATS[fmt_name](r))
    return p
