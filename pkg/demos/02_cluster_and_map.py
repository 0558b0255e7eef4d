"""Cluster three applications, then place the clusters on a 4x4 mesh.

Run: python3 demos/02_cluster_and_map.py
"""

import numpy as np

from waanso.model import GeneratorConfig, generate_mesh, generate_workload, latent_group
from waanso.optimizers import run_aso, run_brute
from waanso.problem import build_problem, random_instance
from waanso.wavecluster import identity_clustering, resolution_sweep

w = generate_workload(3, 16, seed=1, params=GeneratorConfig(groups=4))
mesh = generate_mesh(4, 4)

diag = []
clusters = resolution_sweep(w, seed=1, diagnostics=diag)
for rep in diag:
    print(f"r={rep.resolution:2d}  cells={rep.significant:2d}  components={rep.components}"
          f"  clusters={rep.n_clusters}  f_cost={rep.f_cost:.3f}  merged={rep.merged_links}")
print("chosen resolution", clusters.resolution, "with", len(clusters), "clusters")
for i, members in enumerate(clusters.clusters):
    groups = sorted({latent_group(t, 4) for _, t in members})
    print(f"  cluster {i}: {len(members)} tasks, latent groups {groups}")

# Same optimizer, with and without clustering.  Normalizers differ per
# clustering, so compare raw energy and makespan rather than the total.
for name, c in (("wavelet", clusters), ("identity", identity_clustering(w))):
    problem = build_problem(w, c, mesh, alpha=0.5)
    r = run_aso(problem, seed=0)
    print(f"{name:9s} energy={r.cost.energy:9.0f}  makespan={r.cost.makespan_cycles:8.2f}")

# Small instances can be checked against exhaustive search.
p = random_instance(5, 3, 3, seed=7)
best = run_brute(p)
found = run_aso(p, seed=7)
print("aso", found.cost.total, "vs optimum", best.cost.total)
print("convergence:", np.round(found.history[::40], 4))
