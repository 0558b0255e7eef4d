import numpy as np
import pytest

from conftest import app, workload
from waanso.cost import EnergyParams, evaluate_mapping
from waanso.errors import InfeasibleError
from waanso.model import Clustering, generate_mesh, generate_workload, validate_mapping
from waanso.problem import MappingProblem, build_problem, random_clustering, random_instance


@pytest.mark.parametrize("seed", range(6))
def test_batched_evaluator_matches_reference(seed):
    rng = np.random.default_rng(seed)
    w = generate_workload(3, 10, seed)
    t = generate_mesh(3, 3)
    cl = random_clustering(w, 7, seed)
    p = build_problem(w, cl, t, EnergyParams(1.0, 0.7), alpha=0.3)
    for _ in range(10):
        placements = [rng.permutation(9)[: c.k] for c in p.components]
        m = p.to_mapping(placements)
        assert validate_mapping(m, cl, t, w) == []
        ref = evaluate_mapping(w, cl, m, t, p.energy_params, p.cost_params)
        got = p.breakdown(placements)
        assert got.energy == pytest.approx(ref.energy, rel=1e-12)
        assert got.makespan_cycles == pytest.approx(ref.makespan_cycles, rel=1e-12)
        assert got.total == pytest.approx(ref.total, rel=1e-12)


def test_placements_roundtrip():
    p = random_instance(4, 3, 3, 1)
    placements = [np.array([4, 0, 8, 2])]
    back = p.placements_of(p.to_mapping(placements))
    assert [list(x) for x in back] == [[4, 0, 8, 2]]


def test_infeasible_when_app_needs_more_cores():
    w = generate_workload(1, 5, 0)
    with pytest.raises(InfeasibleError):
        MappingProblem(w, Clustering.from_groups([[k] for k in w.keys()]), generate_mesh(2, 2))


def test_apps_in_separate_components_fit():
    w = generate_workload(3, 4, 0)
    cl = Clustering.from_groups([[k] for k in w.keys()])
    p = MappingProblem(w, cl, generate_mesh(2, 2))
    assert len(p.components) == 3


def test_single_cluster_fitness_is_normalized_intra_energy():
    w = workload(app(3, [(0, 1, 10), (1, 2, 30)]))
    cl = Clustering.from_groups([w.keys()])
    p = build_problem(w, cl, generate_mesh(2, 2), alpha=0.0)
    # every core gives the same cost: intra-cluster energy over its own maximum
    f = p.fitness(0, np.arange(4)[:, None])
    assert np.all(f == 1.0)
