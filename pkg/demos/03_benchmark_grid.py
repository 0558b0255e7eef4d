"""A small algorithm x clustering grid, reported as medians over seeds.

Run: python3 demos/03_benchmark_grid.py  (about a minute)
The same grid is available from the shell with a suite file:
    waanso bench --suite reference --out results.csv --summary summary.txt
"""

from waanso.harness import csv_text, run_bench, suite_from_dict, summary_text

suite = suite_from_dict({
    "schema": "suite.v1",
    "workload": {"generator": {"apps": 3, "tasks": 16, "groups": 4, "seed": 11}},
    "topology": "4x4",
    "algorithms": [
        {"name": "aso", "params": {"iterations": 100}},
        {"name": "dpso", "params": {"iterations": 100}},
        {"name": "aco", "params": {"iterations": 100}},
        {"name": "bnb", "params": {"node_limit": 5000}},
    ],
    "clustering_modes": ["wavelet", "identity"],
    "seeds": [1, 2, 3],
    "alpha": 0.5,
})

result = run_bench(suite)
print(summary_text(result))
print(csv_text(result).splitlines()[0])
print(csv_text(result).splitlines()[1])
