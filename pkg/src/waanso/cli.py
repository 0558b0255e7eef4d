"""``waanso`` command line: gen, cluster, map, bench.

Exit status 0 on success, 2 for invalid input, 3 when the mapping is
infeasible (some application has more clusters than the mesh has cores).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .cost import EnergyParams
from .errors import InfeasibleError, InvalidArgument, WaansoError
from .harness import emit_report, load_suite, run_algorithm, run_bench
from .model import Clustering, GeneratorConfig, Workload, generate_workload, load_workload, parse_topology, save_workload
from .optimizers import ALGORITHMS
from .problem import build_problem
from .wavecluster import diagnostics_dict, identity_clustering, resolution_sweep

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE = 0, 2, 3


def _write_json(path, obj):
    text = json.dumps(obj, indent=2) + "\n"
    if str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# -- clusters file ---------------------------------------------------------------


def clustering_to_dict(c: Clustering) -> dict:
    q = c.quality
    return {
        "resolution": c.resolution,
        "clusters": [[[a, t] for a, t in members] for members in c.clusters],
        "f_cost": None if q is None else q.f_cost,
        "per_cluster_entropy": None if q is None else list(q.entropies),
    }


def clustering_from_dict(d: dict, w: Workload) -> Clustering:
    """Members are ``[app, task]`` pairs; bare task ids are accepted for one-application workloads."""
    groups = []
    for members in d["clusters"]:
        keys = []
        for m in members:
            if isinstance(m, int):
                if len(w.applications) != 1:
                    raise ValueError("bare task ids are ambiguous with several applications")
                keys.append((0, m))
            else:
                a, t = m
                keys.append((int(a), int(t)))
        groups.append(keys)
    c = Clustering.from_groups(groups, d.get("resolution"))
    bad = c.check_partition(w)
    if bad:
        raise ValueError("clusters file is not a partition of the workload: " + "; ".join(bad))
    return c


# -- commands ----------------------------------------------------------------------


def cmd_gen(args) -> int:
    cfg = GeneratorConfig(groups=args.groups, signal_length=args.signal_length)
    w = generate_workload(args.apps, args.tasks, args.seed, cfg)
    save_workload(w, args.out)
    return EXIT_OK


def cmd_cluster(args) -> int:
    w = load_workload(args.workload)
    reports = [] if args.diagnostics else None
    c = resolution_sweep(w, args.wavelet, args.levels, args.sat_tol, args.seed, diagnostics=reports)
    _write_json(args.out, clustering_to_dict(c))
    if args.diagnostics:
        _write_json(args.diagnostics, diagnostics_dict(w, reports, args.wavelet, args.levels))
    return EXIT_OK


def _algo_params(args) -> dict:
    if args.algo in ("aso", "dpso"):
        return {"iterations": args.iters, "population": args.pop}
    if args.algo == "aco":
        return {"iterations": args.iters, "ants": args.pop}
    if args.algo == "bnb":
        return {"time_limit_ms": args.time_limit_ms, "node_limit": args.node_limit}
    return {}


def cmd_map(args) -> int:
    w = load_workload(args.workload)
    t = parse_topology(args.topology, args.bandwidth, args.hop_latency)
    if args.clusters:
        try:
            c = clustering_from_dict(json.loads(Path(args.clusters).read_text()), w)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgument(f"{args.clusters}: {exc}") from exc
    else:
        c = identity_clustering(w)
    energy = EnergyParams(args.e_router_bit, args.e_link_bit)
    problem = build_problem(w, c, t, energy, args.alpha, args.calib_samples)
    r = run_algorithm(problem, args.algo, _algo_params(args), args.seed)
    out = {
        "algo": args.algo,
        "seed": args.seed,
        "assignment": {str(k): f"{rc[0]},{rc[1]}" for k, rc in sorted(r.mapping.assignment.items())},
        "cost": {"energy": r.cost.energy, "makespan": r.cost.makespan_cycles, "total": r.cost.total},
        "optimal": r.optimal,
        "history": r.history,
    }
    _write_json(args.out, out)
    return EXIT_OK


def cmd_bench(args) -> int:
    result = run_bench(load_suite(args.suite))
    emit_report(result, "csv", args.out)
    if args.summary:
        emit_report(result, "summary", args.summary)
    if args.plot_data:
        emit_report(result, "plot-data", args.plot_data)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="waanso", description="Wavelet clustering and swarm mapping of task graphs onto a mesh NoC.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic workload")
    g.add_argument("--apps", type=int, default=3)
    g.add_argument("--tasks", type=int, default=16, help="tasks per application")
    g.add_argument("--groups", type=int, default=4)
    g.add_argument("--signal-length", type=int, default=64)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("cluster", help="wavelet clustering of a workload")
    c.add_argument("--workload", required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--wavelet", choices=("haar", "db4"), default="haar")
    c.add_argument("--levels", type=int, default=2)
    c.add_argument("--sat-tol", type=float, default=0.05)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--diagnostics", metavar="PATH", help="write grid densities, strengths, threshold and variances")
    c.set_defaults(func=cmd_cluster)

    m = sub.add_parser("map", help="map clusters onto the mesh")
    m.add_argument("--workload", required=True)
    m.add_argument("--clusters", help="clusters file; default is one cluster per task")
    m.add_argument("--topology", default="8x8")
    m.add_argument("--bandwidth", type=float, default=32.0)
    m.add_argument("--hop-latency", type=float, default=1.0)
    m.add_argument("--algo", choices=ALGORITHMS, default="aso")
    m.add_argument("--alpha", type=float, default=0.5)
    m.add_argument("--e-router-bit", type=float, default=1.0)
    m.add_argument("--e-link-bit", type=float, default=0.5)
    m.add_argument("--calib-samples", type=int, default=100)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--iters", type=int, default=200)
    m.add_argument("--pop", type=int, default=32)
    m.add_argument("--time-limit-ms", type=float, default=60000.0)
    m.add_argument("--node-limit", type=int, default=None)
    m.add_argument("--out", required=True)
    m.set_defaults(func=cmd_map)

    b = sub.add_parser("bench", help="run a benchmark suite")
    b.add_argument("--suite", required=True, help="suite.v1 JSON file, or 'reference'")
    b.add_argument("--out", required=True)
    b.add_argument("--summary")
    b.add_argument("--plot-data")
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"waanso: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (WaansoError, ValueError, OSError) as exc:
        print(f"waanso: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
