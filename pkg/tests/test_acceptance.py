"""End-to-end acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line with the measured numbers, whether
or not the assertion holds.
"""

import os
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import rand_index
from waanso.model import GeneratorConfig, generate_mesh, generate_workload, latent_group
from waanso.optimizers import AsoParams, apply_swaps, diff_swaps, run_aco, run_aso, run_bnb, run_brute, run_dpso
from waanso.problem import build_problem, random_instance
from waanso.wavecluster import identity_clustering, resolution_sweep
from waanso.wavelet import coeff_distribution, dwt, idwt, rwe


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")
        return ok

    return emit


def test_c01_bnb_equals_brute(report):
    start = time.perf_counter()
    mismatches, configs = [], set()
    for i in range(50):
        alpha = (0.0, 0.5, 1.0)[i % 3]
        if i % 2 == 0:
            rows, k = 2, 3 + (i // 2) % 2
        else:
            rows, k = 3, 3 + (i // 2) % 4
        p = random_instance(k, rows, rows, 1000 + i, alpha=alpha)
        b, x = run_bnb(p), run_brute(p)
        configs.add((k, rows, alpha))
        if not (b.cost.total == x.cost.total and b.optimal is True):
            mismatches.append(i)
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < 60.0
    report(1, ok, f"50 instances, {len(configs)} (clusters, mesh, alpha) configs, mismatches={mismatches}, {elapsed:.1f}s")
    assert ok


def test_c02_metaheuristic_quality(report):
    hits = {"aso4": 0, "aso6": 0, "dpso6": 0, "aco6": 0}
    for s in range(20):
        p4, p6 = random_instance(4, 2, 2, 100 + s), random_instance(6, 3, 3, 100 + s)
        opt4, opt6 = run_brute(p4).cost.total, run_brute(p6).cost.total
        hits["aso4"] += run_aso(p4, seed=s).cost.total == opt4
        hits["aso6"] += run_aso(p6, seed=s).cost.total == opt6
        hits["dpso6"] += run_dpso(p6, seed=s).cost.total == opt6
        hits["aco6"] += run_aco(p6, seed=s).cost.total == opt6
    ok = hits["aso4"] >= 18 and hits["aso6"] >= 15 and hits["dpso6"] >= 12 and hits["aco6"] >= 12
    report(2, ok, "optimum hits /20: " + ", ".join(f"{k}={v}" for k, v in hits.items()))
    assert ok


def test_c03_ordering(report):
    w = generate_workload(1, 16, 2024)
    p = build_problem(w, identity_clustering(w), generate_mesh(4, 4), alpha=0.5)
    res = {"aso": [], "dpso": [], "aco": []}
    walls = []
    for s in range(20):
        t0 = time.perf_counter()
        res["aso"].append(run_aso(p, seed=s).cost)
        walls.append(time.perf_counter() - t0)
        res["dpso"].append(run_dpso(p, seed=s).cost)
        res["aco"].append(run_aco(p, seed=s).cost)
    med = {k: float(np.median([c.total for c in v])) for k, v in res.items()}
    aso_energy = float(np.median([c.energy for c in res["aso"]]))
    # B&B gets the same wall-clock budget as a median ASO run
    bnb = run_bnb(p, time_limit_ms=1000.0 * float(np.median(walls)))
    ok_total = med["aso"] <= med["dpso"] and med["aso"] <= med["aco"]
    ok_energy = aso_energy <= bnb.cost.energy
    report(3, ok_total and ok_energy,
           "median total aso={aso:.6f} dpso={dpso:.6f} aco={aco:.6f}; ".format(**med)
           + f"median energy aso={aso_energy:.0f} vs time-limited bnb={bnb.cost.energy:.0f}")
    assert ok_total and ok_energy


def test_c04_clustering_benefit(report):
    t = generate_mesh(4, 4)
    wc, ident = [], []
    for s in range(10):
        w = generate_workload(3, 16, s, GeneratorConfig(groups=4))
        for clustering, out in ((resolution_sweep(w, seed=s), wc), (identity_clustering(w), ident)):
            p = build_problem(w, clustering, t)
            r = run_aso(p, seed=s)
            out.append(r.cost.makespan_cycles)
    a, b = float(np.median(wc)), float(np.median(ident))
    ok = a <= b
    report(4, ok, f"median makespan WC+ASO={a:.2f} identity+ASO={b:.2f} ({100 * (1 - a / b):.1f}% lower)")
    assert ok


def test_c05_dwt(report):
    rng = np.random.default_rng(5)
    worst_rt, worst_parseval = 0.0, 0.0
    for i in range(1000):
        n = 2 ** int(rng.integers(1, 11))
        x = rng.uniform(-1e3, 1e3, n)
        name = ("haar", "db4")[i % 2]
        levels = int(rng.integers(1, int(np.log2(n)) + 1))
        p = dwt(x, name, levels)
        worst_rt = max(worst_rt, float(np.max(np.abs(idwt(p, name) - x))))
        e = float(np.sum(x**2))
        worst_parseval = max(worst_parseval, abs(p.total_energy() - e) / e)
    ok = worst_rt <= 1e-12 and worst_parseval <= 1e-10
    report(5, ok, f"max round-trip error {worst_rt:.2e}, max Parseval relative error {worst_parseval:.2e}")
    assert ok


def test_c06_rwe(report):
    rng = np.random.default_rng(6)
    worst, self_ok = np.inf, True
    for i in range(1000):
        n = 2 ** int(rng.integers(1, 8))
        name = ("haar", "db4")[i % 2]
        levels = int(rng.integers(1, int(np.log2(n)) + 1))
        p = coeff_distribution(dwt(rng.standard_normal(n), name, levels))
        q = coeff_distribution(dwt(rng.standard_normal(n) * rng.uniform(0.1, 10), name, levels))
        worst = min(worst, *rwe(p, q), *rwe(q, p))
        self_ok &= rwe(p, p) == (0.0, 0.0)
    ok = worst >= 0.0 and self_ok
    report(6, ok, f"min rwe component {worst:.3e}, rwe(p,p)==[0,0] on all: {self_ok}")
    assert ok


def test_c07_clustering_recovery(report):
    counts = {}
    for groups in (2, 4):
        hits = 0
        for s in range(10):
            w = generate_workload(2, 16, s, GeneratorConfig(groups=groups))
            c = resolution_sweep(w, seed=s)
            lab = c.cluster_of
            ri = rand_index([latent_group(t, groups) for _, t in w.keys()], [lab[k] for k in w.keys()])
            hits += len(c) == groups and ri >= 0.9
        counts[groups] = hits
    ok = counts[2] >= 8 and counts[4] >= 8
    report(7, ok, f"exact recovery: 2 groups {counts[2]}/10, 4 groups {counts[4]}/10")
    assert ok


def test_c08_reduction(report):
    w = generate_workload(1, 16, 2024)
    p = build_problem(w, identity_clustering(w), generate_mesh(4, 4))
    identical = 0
    for s in range(5):
        a = run_aso(p, AsoParams(q0=1.0, q1=0.0), seed=s, record=True)
        d = run_dpso(p, seed=s, record=True)
        same = a.history == d.history and len(a.trace[0]) == len(d.trace[0])
        for (pa, fa), (pd, fd) in zip(a.trace[0], d.trace[0]):
            same &= np.array_equal(pa, pd) and np.array_equal(fa, fd)
        identical += same
    ok = identical == 5
    report(8, ok, f"bit-identical trajectories on {identical}/5 seeds ({len(d.trace[0])} snapshots each)")
    assert ok


def test_c09_bench_determinism(report, tmp_path):
    outputs = []
    for i, threads in enumerate(("1", "1", "8")):
        out = tmp_path / f"r{i}.csv"
        env = dict(os.environ, WAANSO_THREADS=threads)
        subprocess.run(
            [sys.executable, "-m", "waanso.cli", "bench", "--suite", "reference", "--out", str(out)],
            check=True, env=env,
        )
        outputs.append(out.read_bytes())
    ok = outputs[0] == outputs[1] == outputs[2] and len(outputs[0].splitlines()) > 1
    report(9, ok, f"reference suite CSV ({len(outputs[0].splitlines()) - 1} rows) identical across 2 runs and WAANSO_THREADS 1/8: {ok}")
    assert ok


def test_c10_swap_algebra(report):
    rng = np.random.default_rng(10)
    bad_apply = bad_len = 0
    for _ in range(10_000):
        n = int(rng.integers(2, 65))
        p, q = rng.permutation(n), rng.permutation(n)
        d = diff_swaps(p, q)
        bad_apply += not np.array_equal(apply_swaps(p, d), q)
        bad_len += len(d) > n - 1
    ok = bad_apply == 0 and bad_len == 0
    report(10, ok, f"10^4 pairs: apply failures={bad_apply}, length violations={bad_len}")
    assert ok
